#pragma once

#include <Eigen/SparseCore>
#include <optional>
#include <vector>

#include "graphnls/stationary.hpp"

namespace graphnls {

/// Second variation of the constrained energy at a state:
///   H = K + lambda D - rho (p-1) D_w,   D_w = D diag(|u|^{p-2}),
/// with the trapezoid weights D of the solver, so H is exactly the Newton
/// Jacobian at the solution. G = K + D is the discrete H^1 Gram used for the
/// -theta ||.||^2 threshold; Du spans the normal of the mass sphere.
struct ConstrainedHessian {
    std::shared_ptr<const DiscreteOperators> ops;
    Eigen::SparseMatrix<double> H;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd Du;              // weighted state; tangent space is Du^perp
    Eigen::VectorXd u;               // reduced state vector
    double quadratic_form(const Eigen::VectorXd& v) const { return v.dot(H * v); }
};

ConstrainedHessian build_hessian(const StationaryState& s);

/// Hessian for an arbitrary pair (u, lambda) on a mesh; used for the
/// negative-frequency eigenvalue-count experiments.
ConstrainedHessian build_hessian(std::shared_ptr<const DiscreteOperators> ops,
                                 const GraphFunction& u, double lambda, double rho, double p);

/// Number of eigenvalues below -theta of the pencil (H, G) restricted to the
/// tangent space {v : v^T Du = 0} (or the full space). Inertia of a bordered
/// LDLT factorization; dense eigendecomposition below `dense_cap` unknowns
/// or when the sparse factorization degenerates.
int approximate_morse_index(const ConstrainedHessian& hess, double theta, bool tangent = true,
                            int dense_cap = 2000);

/// Dense-oracle count (generalized eigensolve on an explicit tangent basis).
int dense_index(const ConstrainedHessian& hess, double theta, bool tangent = true);

struct IndexCertificate {
    int index_theta0 = -1;
    int index_theta = -1;            // at the reporting threshold
    double theta = 1e-8;
    int full_space_index = -1;
    std::vector<double> lowest_eigenvalues;   // up to five most negative pencil values
    bool pass = false;               // index <= 1
};

/// Certificate per the mountain-pass bound: PASS iff the constrained index
/// at theta = 0 is at most 1.
IndexCertificate index_certificate(const StationaryState& s);

}  // namespace graphnls
