#include "graphnls/morse.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphnls {

namespace {

Eigen::VectorXd lumped(const DiscreteOperators& ops) {
    const Eigen::VectorXd& w = ops.mesh->quadrature_weights();
    Eigen::VectorXd d(ops.dim());
    for (int i = 0; i < ops.dim(); ++i) d[i] = w[ops.free_nodes[i]];
    return d;
}

ConstrainedHessian make_hessian(std::shared_ptr<const DiscreteOperators> ops,
                                const Eigen::VectorXd& x, double lambda, double rho, double p) {
    ConstrainedHessian hess;
    hess.ops = ops;
    hess.u = x;
    const Eigen::VectorXd d = lumped(*ops);
    hess.H = ops->stiffness;
    hess.G = ops->stiffness;
    for (int i = 0; i < x.size(); ++i) {
        hess.H.coeffRef(i, i) +=
            lambda * d[i] - rho * (p - 1.0) * d[i] * std::pow(std::abs(x[i]), p - 2.0);
        hess.G.coeffRef(i, i) += d[i];
    }
    hess.Du = d.cwiseProduct(x);
    return hess;
}

// Inertia (negative count) of a sparse symmetric matrix via unpivoted LDLT.
// Returns nullopt when the factorization degenerates (tiny or non-finite
// pivots), in which case callers fall back to the dense path.
std::optional<int> ldlt_negative_count(const Eigen::SparseMatrix<double>& A) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    const Eigen::VectorXd D = ldlt.vectorD();
    double scale = 0.0;
    for (int i = 0; i < D.size(); ++i) {
        if (!std::isfinite(D[i])) return std::nullopt;
        scale = std::max(scale, std::abs(D[i]));
    }
    int neg = 0;
    for (int i = 0; i < D.size(); ++i) {
        if (std::abs(D[i]) <= 1e-13 * scale) return std::nullopt;  // near-singular pivot
        if (D[i] < 0.0) ++neg;
    }
    return neg;
}

}  // namespace

ConstrainedHessian build_hessian(const StationaryState& s) {
    if (!s.ops) throw std::invalid_argument("build_hessian: state carries no operators");
    return make_hessian(s.ops, s.ops->restrict_to_free(s.u.values()), s.lambda, s.rho, s.p);
}

ConstrainedHessian build_hessian(std::shared_ptr<const DiscreteOperators> ops,
                                 const GraphFunction& u, double lambda, double rho, double p) {
    return make_hessian(ops, ops->restrict_to_free(u.values()), lambda, rho, p);
}

int dense_index(const ConstrainedHessian& hess, double theta, bool tangent) {
    const int n = static_cast<int>(hess.H.rows());
    if (n > 6000) throw std::invalid_argument("dense_index: problem too large for the dense path");
    Eigen::MatrixXd H = Eigen::MatrixXd(hess.H) + theta * Eigen::MatrixXd(hess.G);
    if (!tangent || hess.Du.norm() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
        return static_cast<int>((eig.eigenvalues().array() < 0.0).count());
    }
    // Householder basis of the orthogonal complement of Du.
    Eigen::VectorXd b = hess.Du.normalized();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    e0[0] = 1.0;
    Eigen::VectorXd v = b - e0;
    if (v.norm() > 1e-14) {
        v.normalize();
        Q -= 2.0 * v * v.transpose();
    }
    Eigen::MatrixXd T = Q.rightCols(n - 1);  // spans Du^perp
    Eigen::MatrixXd Ht = T.transpose() * H * T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ht, Eigen::EigenvaluesOnly);
    return static_cast<int>((eig.eigenvalues().array() < 0.0).count());
}

int approximate_morse_index(const ConstrainedHessian& hess, double theta, bool tangent,
                            int dense_cap) {
    if (theta < 0.0) throw std::invalid_argument("approximate_morse_index: theta >= 0 required");
    const int n = static_cast<int>(hess.H.rows());
    Eigen::SparseMatrix<double> A = hess.H + theta * hess.G;

    std::optional<int> count;
    if (!tangent || hess.Du.norm() == 0.0) {
        count = ldlt_negative_count(A);
    } else {
        // Bordered matrix [[A, Du], [Du^T, 0]]: its negative inertia exceeds
        // that of A restricted to Du^perp by exactly one.
        Eigen::SparseMatrix<double> B(n + 1, n + 1);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(A.nonZeros() + 2 * n);
        for (int k = 0; k < A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        for (int i = 0; i < n; ++i) {
            trips.emplace_back(i, n, hess.Du[i]);
            trips.emplace_back(n, i, hess.Du[i]);
        }
        B.setFromTriplets(trips.begin(), trips.end());
        if (auto neg = ldlt_negative_count(B)) count = *neg - 1;
    }
    if (count) return *count;
    if (n <= dense_cap) return dense_index(hess, theta, tangent);
    throw std::runtime_error("approximate_morse_index: factorization failed beyond dense fallback");
}

IndexCertificate index_certificate(const StationaryState& s) {
    ConstrainedHessian hess = build_hessian(s);
    IndexCertificate cert;
    cert.theta = 1e-8;
    cert.index_theta0 = approximate_morse_index(hess, 0.0);
    cert.index_theta = approximate_morse_index(hess, cert.theta);
    cert.full_space_index = approximate_morse_index(hess, 0.0, /*tangent=*/false);
    cert.pass = cert.index_theta0 <= 1;

    // Five most negative pencil eigenvalues on the tangent space, by dense
    // eigensolve on moderate meshes only.
    const int n = static_cast<int>(hess.H.rows());
    if (n <= 2000) {
        Eigen::MatrixXd H(hess.H), G(hess.G);
        Eigen::VectorXd b = hess.Du.normalized();
        Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
        e0[0] = 1.0;
        Eigen::VectorXd v = b - e0;
        if (v.norm() > 1e-14) {
            v.normalize();
            Q -= 2.0 * v * v.transpose();
        }
        Eigen::MatrixXd T = Q.rightCols(n - 1);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            T.transpose() * H * T, T.transpose() * G * T, Eigen::EigenvaluesOnly);
        for (int i = 0; i < std::min<int>(5, eig.eigenvalues().size()); ++i)
            cert.lowest_eigenvalues.push_back(eig.eigenvalues()[i]);
    }
    return cert;
}

}  // namespace graphnls
