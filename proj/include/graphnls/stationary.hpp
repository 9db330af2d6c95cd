#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphnls/phase_plane.hpp"
#include "graphnls/spectra.hpp"

namespace graphnls {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discretization and Newton controls for the stationary problem
///   -u'' + lambda u = rho |u|^{p-2} u  +  Kirchhoff vertex conditions.
/// The residual uses the stiffness matrix with trapezoid (lumped) weights for
/// the lambda and nonlinear terms, so the integral identities checked below
/// close at solver tolerance rather than at quadrature order.
struct SolveOptions {
    double h = 0.01;
    double truncation = 10.0;           // half-line cut; states decay like e^{-sqrt(lambda) x}
    FarBc far_bc = FarBc::Dirichlet;
    double newton_tol = 1e-13;          // backward error, componentwise scale
    int max_newton = 80;
    double min_damping = 9.3e-10;       // 2^-30
    // The soliton width shrinks like lambda^{-1/2}; keep a fixed number of
    // nodes per width (and no more truncation than the tails need) when
    // solving without an explicit guess.
    bool auto_resolve = true;
    double points_per_width = 200.0;
};

/// Concrete (h, truncation) for a solve at this lambda, honoring auto_resolve.
SolveOptions resolved_options(SolveOptions opts, double lambda, double p);

struct NewtonTraceRow {
    double lambda = 0.0;
    double mass = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct StationaryState {
    GraphFunction u;
    double lambda = 0.0;
    double rho = 1.0;
    double p = 8.0;
    double mass = 0.0;                // achieved, trapezoid quadrature
    double energy = 0.0;              // E_rho(u)
    double action = 0.0;              // L(u)
    double residual = 0.0;            // relative weak-form residual
    int newton_iterations = 0;
    std::vector<double> edge_levels;  // per-edge mean Hamiltonian
    std::optional<int> morse_index;
    std::shared_ptr<const DiscreteOperators> ops;
};

struct ContinuationTrace {
    std::vector<NewtonTraceRow> rows;
    double bracket_lo = 0.0, bracket_hi = 0.0;   // lambda bracket for the target mass
};

/// Line homoclinic A sech^{2/(p-2)}(B d(x, center)) transplanted to the graph
/// by shortest-path distance from the point at arclength s on edge `center`.
GraphFunction soliton_profile(const std::shared_ptr<const Mesh>& mesh, double lambda, double rho,
                              double p, int center_edge, double center_s);

/// Convenience: peak amplitude and decay rate of the profile.
double soliton_amplitude(double lambda, double rho, double p);
double soliton_decay_rate(double lambda, double p);
/// Closed-form mass of the full-line soliton (test oracle for continuation).
double line_soliton_mass(double lambda, double rho, double p);

/// Damped Newton from the given guess at fixed lambda. Throws solver_error on
/// divergence, convergence to zero, or a nonpositive state.
StationaryState solve_fixed_lambda(const MetricGraph& g, double lambda, double rho, double p,
                                   const GraphFunction& guess, const SolveOptions& opts = {});

/// Same, with the built-in multi-start soliton guesses (max-degree vertex,
/// its antipode, midpoint of the longest edge).
StationaryState solve_fixed_lambda(const MetricGraph& g, double lambda, double rho, double p,
                                   const SolveOptions& opts = {});

/// Sweep mu(lambda) over the grid, bracket the target mass, refine by secant.
StationaryState continuation_to_mass(const MetricGraph& g, double mu_target, double rho, double p,
                                     const std::vector<double>& lambda_grid,
                                     const SolveOptions& opts = {},
                                     ContinuationTrace* trace = nullptr);

/// lambda = (rho int |u|^p - int |u'|^2) / int |u|^2  (almost Lagrange multiplier).
double lagrange_multiplier(const GraphFunction& u, double rho, double p);

/// int (u')^2 + lambda int u^2 - rho int u^p  (vanishes on solutions).
double pohozaev_residual(const GraphFunction& u, double lambda, double rho, double p);

struct ActionIdentityReport {
    double energy_form_residual = 0.0;   // E vs (1/2-1/p) a - (lambda/p) b
    double action_form_residual = 0.0;   // L vs (1/2+1/p) a - lambda (1/2-1/p) b
    double combined_residual = 0.0;      // (1/2-1/p) L - (1/2+1/p) E - (3 lambda/2)(1/p-1/6) mu
    double scale = 1.0;                  // normalization used for "relative"
    bool critical_point = true;          // false when the intermediate forms fail
};

ActionIdentityReport action_identity_check(const StationaryState& s);

struct EdgeHamiltonianReport {
    std::vector<double> mean;        // per edge
    std::vector<double> max_dev;     // per edge, absolute
    double worst_dev = 0.0;          // absolute, over all edges
    double worst_rel_dev = 0.0;      // relative to max(|mean|, |beta(lambda)|)
    double scale = 1.0;
};

/// Edge Hamiltonian (1/2)(u')^2 + (rho/p)u^p - (lambda/2)u^2 at interior
/// nodes, with the central difference corrected to O(h^4) through the edge
/// ODE; constancy deviation is O(h^2).
EdgeHamiltonianReport edge_hamiltonians(const StationaryState& s);

struct CorollaryReport {
    double lhs = 0.0;                // sum over negative-level edges of |e| |l_e|
    double rhs = 0.0;
    double slack = 0.0;              // lhs - rhs
    double halfline_share = 0.0;     // part of lhs from truncated half-lines
    bool any_negative = false;
};

CorollaryReport corollary_bound_check(const StationaryState& s);

struct FluxReport {
    std::vector<double> vertex_flux;   // per graph vertex; boundary vertices NaN
    double max_abs = 0.0;
    double max_rel = 0.0;              // relative to max |u'|
};

/// Kirchhoff flux at each free vertex from one-sided differences corrected
/// by the edge ODE curvature (plain differences stall at O(h^2)).
FluxReport kirchhoff_flux(const StationaryState& s);

struct MpGeometry {
    double k1 = 0.0;
    double k0 = 0.0;          // k1 / 2
    double kappa_at_k0 = 0.0;
};

/// Mountain-pass well: k1 and kappa_rho(k0) = (k0/2)(1 - (k0/k1)^{(p-6)/4}).
MpGeometry mp_geometry(double mu, double p, double rho, double K);
double kappa_rho_of_k(double k, double mu, double p, double rho, double K);

struct ScalingCurveRow {
    double t = 0.0;
    double closed_form = 0.0;
    double direct = 0.0;
    double mass = 0.0;
};

struct ScalingCurveReport {
    std::vector<ScalingCurveRow> rows;
    double base_mass = 0.0;
    double first_negative_t = -1.0;    // first grid t with negative energy, -1 if none
};

/// Energy along w_t(x) = t^{1/2} w(t x) for a compactly supported profile
/// sampled with spacing h on one edge; both the closed form and a direct
/// evaluation on the contracted grid are reported.
ScalingCurveReport scaling_curve(const std::vector<double>& w_samples, double h,
                                 double edge_length, const std::vector<double>& t_grid, double rho,
                                 double p);

struct SigmaReport {
    std::vector<double> sigma;       // per cell cut, left-to-right orientation
    bool strictly_increasing = false;
    bool strictly_decreasing = false;
};

/// Derivative fluxes through the cell cuts of a periodic catalog graph.
/// Throws when the graph carries no cell metadata.
SigmaReport flux_sigma(const GraphFunction& u);

struct BlowupRow {
    double lambda = 0.0;
    int edge = -1;
    double level = 0.0;              // mean edge Hamiltonian
    double rescaled_level = 0.0;     // level * lambda^{-p/(p-2)}
    double predictor_asym = 0.0;     // -|e| kappa_p rho^{-2/(p-2)} lambda^{2/(p-2)} / ln(-l~)
    double predictor_quad = 0.0;     // |e| N(l)/T(l) by quadrature
    double actual = 0.0;             // int_e u^2
};

/// Per-state, per-negative-level-edge comparison of the measured edge mass
/// against the period/mass predictors. Throws when no edge qualifies.
std::vector<BlowupRow> blowup_diagnostics(const std::vector<StationaryState>& states);

/// Helper shared by the diagnostics: trapezoid int u^2 restricted to edge e.
double edge_mass(const GraphFunction& u, int e);

}  // namespace graphnls
