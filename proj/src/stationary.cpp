#include "graphnls/stationary.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace graphnls {

double soliton_amplitude(double lambda, double rho, double p) {
    return std::pow(p * lambda / (2.0 * rho), 1.0 / (p - 2.0));
}

double soliton_decay_rate(double lambda, double p) {
    return 0.5 * (p - 2.0) * std::sqrt(lambda);
}

double line_soliton_mass(double lambda, double rho, double p) {
    const double q = 4.0 / (p - 2.0);
    const double sech_int = std::sqrt(M_PI) * std::tgamma(0.5 * q) / std::tgamma(0.5 * (q + 1.0));
    const double A = soliton_amplitude(lambda, rho, p);
    const double B = soliton_decay_rate(lambda, p);
    return A * A / B * sech_int;
}

GraphFunction soliton_profile(const std::shared_ptr<const Mesh>& mesh, double lambda, double rho,
                              double p, int center_edge, double center_s) {
    if (!(lambda > 0.0)) throw std::invalid_argument("soliton_profile: lambda must be positive");
    const double A = soliton_amplitude(lambda, rho, p);
    const double B = soliton_decay_rate(lambda, p);
    const double expo = 2.0 / (p - 2.0);
    Eigen::VectorXd d = mesh->distance_from_point(center_edge, center_s);
    Eigen::VectorXd vals(d.size());
    for (int i = 0; i < d.size(); ++i) vals[i] = A * std::pow(1.0 / std::cosh(B * d[i]), expo);
    return GraphFunction(mesh, std::move(vals));
}

namespace {

// Trapezoid weights restricted to free nodes.
Eigen::VectorXd lumped_weights(const DiscreteOperators& ops) {
    const Eigen::VectorXd& w = ops.mesh->quadrature_weights();
    Eigen::VectorXd d(ops.dim());
    for (int i = 0; i < ops.dim(); ++i) d[i] = w[ops.free_nodes[i]];
    return d;
}

Eigen::VectorXd power_term(const Eigen::VectorXd& x, double p) {
    Eigen::VectorXd out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = std::pow(std::abs(x[i]), p - 2.0) * x[i];
    return out;
}

struct NewtonOutcome {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

NewtonOutcome newton_solve(const DiscreteOperators& ops, const Eigen::VectorXd& d, double lambda,
                           double rho, double p, Eigen::VectorXd x, const SolveOptions& opts) {
    const auto& K = ops.stiffness;
    const Eigen::SparseMatrix<double> absK = K.cwiseAbs();
    auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return K * v + lambda * d.cwiseProduct(v) - rho * d.cwiseProduct(power_term(v, p));
    };
    // Backward-error scale: componentwise magnitudes, so the attainable floor
    // stays O(machine eps) on any mesh.
    auto res_scale = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd av = v.cwiseAbs();
        return (absK * av + std::abs(lambda) * d.cwiseProduct(av) +
                rho * d.cwiseProduct(power_term(av, p)))
            .norm();
    };

    Eigen::SparseMatrix<double> J = K;  // pattern reused; diagonal updated in place
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    NewtonOutcome out;
    bool polished = false;
    Eigen::VectorXd r = residual(x);
    for (int it = 0; it < opts.max_newton; ++it) {
        const double scale = res_scale(x);
        out.iterations = it;
        out.residual = scale > 0 ? r.norm() / scale : 0.0;
        if (scale == 0.0 || r.norm() <= opts.newton_tol * scale) {
            // One undamped polish step pushes the residual to its floor.
            if (!polished && scale > 0.0 && r.norm() > 0.0) {
                polished = true;
            } else {
                out.x = x;
                return out;
            }
        }
        J = K;
        for (int i = 0; i < x.size(); ++i)
            J.coeffRef(i, i) +=
                lambda * d[i] - rho * (p - 1.0) * d[i] * std::pow(std::abs(x[i]), p - 2.0);
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw solver_error("newton: Jacobian factorization failed");
        Eigen::VectorXd dx = lu.solve(-r);

        // Armijo backtracking on the residual norm.
        const double r0 = r.norm();
        double t = 1.0;
        while (true) {
            Eigen::VectorXd xt = x + t * dx;
            Eigen::VectorXd rt = residual(xt);
            if (rt.norm() <= (1.0 - 1e-4 * t) * r0) {
                x = std::move(xt);
                r = std::move(rt);
                break;
            }
            t *= 0.5;
            if (t < opts.min_damping) {
                // Rounding-limited: accept when already essentially converged.
                if (r0 <= 1e-8 * scale) {
                    out.x = x;
                    out.residual = r0 / scale;
                    return out;
                }
                throw solver_error("newton: line search stalled (residual " +
                                   std::to_string(r0 / scale) + " relative)");
            }
        }
    }
    throw solver_error("newton: no convergence after max iterations (residual " +
                       std::to_string(out.residual) + ")");
}

StationaryState finish_state(std::shared_ptr<const DiscreteOperators> ops,
                             const Eigen::VectorXd& x, double lambda, double rho, double p,
                             const NewtonOutcome& nw, double guess_scale) {
    if (x.cwiseAbs().maxCoeff() <= 1e-10 * std::max(guess_scale, 1.0))
        throw solver_error("newton: converged to the zero function");
    if (x.minCoeff() <= 0.0)
        throw solver_error("newton: converged to a nonpositive state");

    StationaryState s;
    s.ops = ops;
    s.u = ops->expand(x);
    s.lambda = lambda;
    s.rho = rho;
    s.p = p;
    s.residual = nw.residual;
    s.newton_iterations = nw.iterations;
    const double a = h1_semi_sq(s.u);
    const double b = l2_norm_sq(s.u);
    const double P = lp_integral(s.u, p);
    s.mass = b;
    s.energy = 0.5 * a - rho / p * P;
    s.action = 0.5 * a + rho / p * P - 0.5 * lambda * b;
    s.edge_levels = edge_hamiltonians(s).mean;
    return s;
}

struct Center {
    int edge;
    double s;
};

std::vector<Center> default_centers(const DiscreteOperators& ops) {
    const MetricGraph& g = ops.mesh->graph();
    std::vector<Center> centers;
    int vmax = 0;
    for (int v = 1; v < g.num_vertices(); ++v)
        if (g.degree(v) > g.degree(vmax)) vmax = v;
    const int e0 = g.incidence()[vmax].front();
    const double s0 = g.edges[e0].a == vmax ? 0.0 : g.meshed_length(e0);
    // A peak at a Dirichlet-constrained vertex cannot seed a positive state.
    if (ops.node_to_free[ops.mesh->vertex_node(vmax)] >= 0) centers.push_back({e0, s0});

    int longest = 0;
    for (int e = 1; e < g.num_edges(); ++e)
        if (g.meshed_length(e) > g.meshed_length(longest)) longest = e;
    centers.push_back({longest, 0.5 * g.meshed_length(longest)});

    // Antipode of the max-degree vertex: free mesh node at maximal distance.
    Eigen::VectorXd dist = ops.mesh->distance_from_point(e0, s0);
    int far_node = -1;
    for (int i = 0; i < dist.size(); ++i)
        if (ops.node_to_free[i] >= 0 && (far_node < 0 || dist[i] > dist[far_node])) far_node = i;
    for (size_t e = 0; e < ops.mesh->edge_meshes().size() && far_node >= 0; ++e) {
        const auto& em = ops.mesh->edge_meshes()[e];
        for (int k = 0; k <= em.intervals; ++k)
            if (em.nodes[k] == far_node) {
                centers.push_back({static_cast<int>(e), em.h * k});
                break;
            }
    }
    return centers;
}

}  // namespace

StationaryState solve_fixed_lambda(const MetricGraph& g, double lambda, double rho, double p,
                                   const GraphFunction& guess, const SolveOptions& opts) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_fixed_lambda: lambda must be positive");
    MetricGraph gt = g;
    gt.truncation_length = opts.truncation;
    gt.finalize();
    auto ops = std::make_shared<DiscreteOperators>(assemble(gt, opts.h, opts.far_bc));
    if (guess.mesh().num_nodes() != ops->mesh->num_nodes())
        throw std::invalid_argument("solve_fixed_lambda: guess mesh does not match options");
    Eigen::VectorXd x0 = ops->restrict_to_free(guess.values());
    if (x0.cwiseAbs().maxCoeff() == 0.0)
        throw solver_error("newton: converged to the zero function");
    const Eigen::VectorXd d = lumped_weights(*ops);
    NewtonOutcome nw = newton_solve(*ops, d, lambda, rho, p, x0, opts);
    return finish_state(ops, nw.x, lambda, rho, p, nw, x0.cwiseAbs().maxCoeff());
}

SolveOptions resolved_options(SolveOptions opts, double lambda, double p) {
    if (!opts.auto_resolve) return opts;
    const double width = 2.0 / ((p - 2.0) * std::sqrt(lambda));
    opts.h = std::min(opts.h, width / opts.points_per_width);
    opts.truncation = std::max(std::min(opts.truncation, 40.0 * width), 8.0 * opts.h);
    opts.auto_resolve = false;
    return opts;
}

StationaryState solve_fixed_lambda(const MetricGraph& g, double lambda, double rho, double p,
                                   const SolveOptions& opts_in) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_fixed_lambda: lambda must be positive");
    const SolveOptions opts = resolved_options(opts_in, lambda, p);
    MetricGraph gt = g;
    gt.truncation_length = opts.truncation;
    gt.finalize();
    auto ops = std::make_shared<DiscreteOperators>(assemble(gt, opts.h, opts.far_bc));
    const Eigen::VectorXd d = lumped_weights(*ops);
    std::string last_error = "no starting centers";
    for (const Center& c : default_centers(*ops)) {
        try {
            GraphFunction guess = soliton_profile(ops->mesh, lambda, rho, p, c.edge, c.s);
            Eigen::VectorXd x0 = ops->restrict_to_free(guess.values());
            NewtonOutcome nw = newton_solve(*ops, d, lambda, rho, p, x0, opts);
            return finish_state(ops, nw.x, lambda, rho, p, nw, x0.cwiseAbs().maxCoeff());
        } catch (const solver_error& err) {
            last_error = err.what();
        }
    }
    throw solver_error("solve_fixed_lambda: all starts failed; last: " + last_error);
}

StationaryState continuation_to_mass(const MetricGraph& g, double mu_target, double rho, double p,
                                     const std::vector<double>& lambda_grid,
                                     const SolveOptions& opts, ContinuationTrace* trace) {
    if (!(mu_target > 0.0))
        throw std::invalid_argument("continuation_to_mass: target mass must be positive");
    if (lambda_grid.size() < 2)
        throw std::invalid_argument("continuation_to_mass: need at least two grid points");

    auto record = [&](const StationaryState& s) {
        if (trace)
            trace->rows.push_back({s.lambda, s.mass, s.newton_iterations, s.residual});
    };

    // Sweep until the target is bracketed; later grid points are not needed
    // (and may sit far beyond the resolved regime).
    const double tol = 1e-8 * mu_target;
    std::vector<StationaryState> branch;
    int lo = -1;
    for (double lam : lambda_grid) {
        branch.push_back(solve_fixed_lambda(g, lam, rho, p, opts));
        record(branch.back());
        if (std::abs(branch.back().mass - mu_target) <= tol) return branch.back();
        const size_t i = branch.size();
        if (i >= 2 &&
            (branch[i - 2].mass - mu_target) * (branch[i - 1].mass - mu_target) < 0.0) {
            lo = static_cast<int>(i) - 2;
            break;
        }
    }
    if (lo < 0) {
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for (const StationaryState& s : branch) {
            mn = std::min(mn, s.mass);
            mx = std::max(mx, s.mass);
        }
        std::ostringstream msg;
        msg << "continuation_to_mass: target " << mu_target << " not bracketed; achieved mass in ["
            << mn << ", " << mx << "]";
        throw solver_error(msg.str());
    }

    StationaryState a = branch[lo], b = branch[lo + 1];
    if (trace) {
        trace->bracket_lo = a.lambda;
        trace->bracket_hi = b.lambda;
    }
    // Pin the mesh for the refinement so mu(lambda) is smooth in lambda.
    const SolveOptions fixed =
        resolved_options(opts, std::max(a.lambda, b.lambda), p);
    StationaryState best = std::abs(a.mass - mu_target) < std::abs(b.mass - mu_target) ? a : b;
    // Illinois-damped false position on mu(lambda) - target.
    double fa = a.mass - mu_target, fb = b.mass - mu_target;
    int side = 0;
    for (int it = 0; it < 80; ++it) {
        double lam = b.lambda - fb * (b.lambda - a.lambda) / (fb - fa);
        const double lo_l = std::min(a.lambda, b.lambda), hi_l = std::max(a.lambda, b.lambda);
        if (!(lam > lo_l && lam < hi_l)) lam = 0.5 * (lo_l + hi_l);
        StationaryState s = solve_fixed_lambda(g, lam, rho, p, fixed);
        record(s);
        const double fs = s.mass - mu_target;
        if (std::abs(fs) < std::abs(best.mass - mu_target)) best = s;
        if (std::abs(fs) <= tol) return s;
        if (fs * fa < 0.0) {
            b = s;
            fb = fs;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = s;
            fa = fs;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    if (std::abs(best.mass - mu_target) <= 1e-6 * mu_target) return best;
    throw solver_error("continuation_to_mass: secant refinement did not reach the target mass");
}

double lagrange_multiplier(const GraphFunction& u, double rho, double p) {
    const double b = l2_norm_sq(u);
    if (b <= 0.0) throw std::invalid_argument("lagrange_multiplier: zero function");
    return (rho * lp_integral(u, p) - h1_semi_sq(u)) / b;
}

double pohozaev_residual(const GraphFunction& u, double lambda, double rho, double p) {
    return h1_semi_sq(u) + lambda * l2_norm_sq(u) - rho * lp_integral(u, p);
}

ActionIdentityReport action_identity_check(const StationaryState& s) {
    const double a = h1_semi_sq(s.u);
    const double b = l2_norm_sq(s.u);
    const double P = lp_integral(s.u, s.p);
    const double E = 0.5 * a - s.rho / s.p * P;
    const double L = 0.5 * a + s.rho / s.p * P - 0.5 * s.lambda * b;
    const double half_minus = 0.5 - 1.0 / s.p, half_plus = 0.5 + 1.0 / s.p;

    ActionIdentityReport rep;
    rep.scale = std::max({std::abs(E), std::abs(L), std::abs(s.lambda) * b, a, 1e-300});
    rep.energy_form_residual = std::abs(E - (half_minus * a - s.lambda / s.p * b)) / rep.scale;
    rep.action_form_residual = std::abs(L - (half_plus * a - s.lambda * half_minus * b)) / rep.scale;
    rep.combined_residual =
        std::abs(half_minus * L - half_plus * E -
                 1.5 * s.lambda * (1.0 / s.p - 1.0 / 6.0) * b) /
        rep.scale;
    const double tol = 1e-6;
    rep.critical_point = rep.energy_form_residual <= tol && rep.action_form_residual <= tol &&
                         rep.combined_residual <= tol;
    return rep;
}

EdgeHamiltonianReport edge_hamiltonians(const StationaryState& s) {
    const Mesh& mesh = s.u.mesh();
    const Eigen::VectorXd& u = s.u.values();
    EdgeHamiltonianReport rep;
    const phase::PhaseParams pp{s.p, std::sqrt(std::max(s.lambda, 0.0)), s.rho};
    const double beta_scale = s.lambda > 0 ? std::abs(pp.beta()) : 0.0;

    for (const auto& em : mesh.edge_meshes()) {
        const double h = em.h;
        double sum = 0.0, count = 0.0;
        std::vector<double> levels;
        for (int k = 1; k < em.intervals; ++k) {
            const double um = u[em.nodes[k - 1]], uc = u[em.nodes[k]], up = u[em.nodes[k + 1]];
            const double central = (up - um) / (2.0 * h);
            // u''' = (lambda - rho (p-1) u^{p-2}) u' corrects the central
            // difference from O(h^2) to O(h^4).
            const double c = s.lambda - s.rho * (s.p - 1.0) * std::pow(std::abs(uc), s.p - 2.0);
            const double du = central / (1.0 + h * h * c / 6.0);
            const double lvl = 0.5 * du * du + s.rho / s.p * std::pow(std::abs(uc), s.p) -
                               0.5 * s.lambda * uc * uc;
            levels.push_back(lvl);
            sum += lvl;
            count += 1.0;
        }
        if (levels.empty()) {
            rep.mean.push_back(0.0);
            rep.max_dev.push_back(0.0);
            continue;
        }
        const double mean = sum / count;
        double dev = 0.0;
        for (double lvl : levels) dev = std::max(dev, std::abs(lvl - mean));
        rep.mean.push_back(mean);
        rep.max_dev.push_back(dev);
    }

    double mean_scale = 0.0;
    for (double m : rep.mean) mean_scale = std::max(mean_scale, std::abs(m));
    rep.scale = std::max({mean_scale, beta_scale, 1e-300});
    for (double d : rep.max_dev) rep.worst_dev = std::max(rep.worst_dev, d);
    rep.worst_rel_dev = rep.worst_dev / rep.scale;
    return rep;
}

CorollaryReport corollary_bound_check(const StationaryState& s) {
    CorollaryReport rep;
    const MetricGraph& g = s.u.mesh().graph();
    EdgeHamiltonianReport lv = edge_hamiltonians(s);
    const double tol_neg = 1e-8 * lv.scale;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (lv.mean[e] < -tol_neg) {
            rep.any_negative = true;
            const double part = g.meshed_length(e) * std::abs(lv.mean[e]);
            rep.lhs += part;
            if (g.edges[e].is_halfline()) rep.halfline_share += part;
        }
    }
    rep.rhs = -(0.5 + 1.0 / s.p) * s.energy +
              1.5 * s.lambda * (1.0 / 6.0 - 1.0 / s.p) * s.mass;
    rep.slack = rep.lhs - rep.rhs;
    return rep;
}

FluxReport kirchhoff_flux(const StationaryState& s) {
    const Mesh& mesh = s.u.mesh();
    const MetricGraph& g = mesh.graph();
    const Eigen::VectorXd& u = s.u.values();
    FluxReport rep;
    rep.vertex_flux.assign(g.num_vertices(), std::numeric_limits<double>::quiet_NaN());

    double max_du = 0.0;
    for (const auto& em : mesh.edge_meshes())
        for (int k = 0; k < em.intervals; ++k)
            max_du = std::max(max_du, std::abs(u[em.nodes[k + 1]] - u[em.nodes[k]]) / em.h);

    for (int v = 0; v < g.num_vertices(); ++v) {
        const int node = mesh.vertex_node(v);
        if (s.ops && s.ops->node_to_free[node] < 0) continue;  // constrained boundary
        const double uv = u[node];
        const double curv = s.lambda * uv - s.rho * std::pow(std::abs(uv), s.p - 2.0) * uv;
        double flux = 0.0;
        double halfspan = 0.0;
        for (int e = 0; e < g.num_edges(); ++e) {  // loops contribute both ends once
            const auto& em = mesh.edge_meshes()[e];
            if (g.edges[e].a == v) {
                flux += (u[em.nodes[1]] - uv) / em.h;
                halfspan += 0.5 * em.h;
            }
            if (!g.edges[e].is_halfline() && g.edges[e].b == v) {
                flux += (u[em.nodes[em.intervals - 1]] - uv) / em.h;
                halfspan += 0.5 * em.h;
            }
        }
        // One-sided differences carry +-(h/2) u'' each; the common curvature
        // lambda u - rho u^{p-1} removes the bias.
        flux -= curv * halfspan;
        rep.vertex_flux[v] = flux;
        rep.max_abs = std::max(rep.max_abs, std::abs(flux));
    }
    rep.max_rel = max_du > 0 ? rep.max_abs / max_du : rep.max_abs;
    return rep;
}

double kappa_rho_of_k(double k, double mu, double p, double rho, double K) {
    const double k1 = std::pow(p / (2.0 * rho * K), 4.0 / (p - 6.0)) *
                      std::pow(mu, -(p + 2.0) / (p - 6.0));
    return 0.5 * k * (1.0 - std::pow(k / k1, (p - 6.0) / 4.0));
}

MpGeometry mp_geometry(double mu, double p, double rho, double K) {
    if (!(p > 6.0)) throw std::invalid_argument("mp_geometry: needs p > 6");
    if (!(K > 0.0) || !(mu > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("mp_geometry: K, mu, rho must be positive");
    MpGeometry geo;
    geo.k1 = std::pow(p / (2.0 * rho * K), 4.0 / (p - 6.0)) *
             std::pow(mu, -(p + 2.0) / (p - 6.0));
    geo.k0 = 0.5 * geo.k1;
    geo.kappa_at_k0 = kappa_rho_of_k(geo.k0, mu, p, rho, K);
    return geo;
}

ScalingCurveReport scaling_curve(const std::vector<double>& w, double h, double edge_length,
                                 const std::vector<double>& t_grid, double rho, double p) {
    if (w.size() < 3) throw std::invalid_argument("scaling_curve: too few samples");
    const double support = h * (w.size() - 1);
    if (support > edge_length)
        throw std::invalid_argument("scaling_curve: support exceeds the edge");
    if (std::abs(w.front()) > 0 || std::abs(w.back()) > 0)
        throw std::invalid_argument("scaling_curve: profile must vanish at the support ends");

    double a = 0.0, P = 0.0, mass = 0.0;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
        const double d = (w[i + 1] - w[i]) / h;
        a += d * d * h;
        P += 0.5 * h * (std::pow(std::abs(w[i]), p) + std::pow(std::abs(w[i + 1]), p));
        mass += 0.5 * h * (w[i] * w[i] + w[i + 1] * w[i + 1]);
    }

    ScalingCurveReport rep;
    rep.base_mass = mass;
    for (double t : t_grid) {
        if (t < 1.0) throw std::invalid_argument("scaling_curve: t grid must satisfy t >= 1");
        ScalingCurveRow row;
        row.t = t;
        row.closed_form = 0.5 * t * t * a - rho * std::pow(t, 0.5 * (p - 2.0)) / p * P;

        const double ht = h / t;
        const double st = std::sqrt(t);
        double at = 0.0, Pt = 0.0, mt = 0.0;
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            const double wi = st * w[i], wj = st * w[i + 1];
            const double d = (wj - wi) / ht;
            at += d * d * ht;
            Pt += 0.5 * ht * (std::pow(std::abs(wi), p) + std::pow(std::abs(wj), p));
            mt += 0.5 * ht * (wi * wi + wj * wj);
        }
        row.direct = 0.5 * at - rho / p * Pt;
        row.mass = mt;
        rep.rows.push_back(row);
        if (rep.first_negative_t < 0 && row.closed_form < 0) rep.first_negative_t = t;
    }
    return rep;
}

SigmaReport flux_sigma(const GraphFunction& u) {
    const Mesh& mesh = u.mesh();
    const MetricGraph& g = mesh.graph();
    if (g.cell_cuts.empty())
        throw std::invalid_argument("flux_sigma: graph has no cell metadata");
    SigmaReport rep;
    for (const CellCut& cut : g.cell_cuts) {
        double sigma = 0.0;
        for (const CellCut::Crossing& c : cut.crossings) {
            const auto& em = mesh.edge_meshes()[c.edge];
            if (em.intervals < 2)
                throw std::invalid_argument("flux_sigma: edge too coarse for one-sided slope");
            const int n = em.intervals;
            const auto& x = u.values();
            double d;
            if (c.s >= 0.5 * g.meshed_length(c.edge)) {
                d = (3.0 * x[em.nodes[n]] - 4.0 * x[em.nodes[n - 1]] + x[em.nodes[n - 2]]) /
                    (2.0 * em.h);
            } else {
                d = (-3.0 * x[em.nodes[0]] + 4.0 * x[em.nodes[1]] - x[em.nodes[2]]) /
                    (2.0 * em.h);
            }
            sigma += c.forward ? d : -d;
        }
        rep.sigma.push_back(sigma);
    }
    rep.strictly_increasing = rep.strictly_decreasing = rep.sigma.size() >= 2;
    for (size_t i = 0; i + 1 < rep.sigma.size(); ++i) {
        rep.strictly_increasing = rep.strictly_increasing && rep.sigma[i + 1] > rep.sigma[i];
        rep.strictly_decreasing = rep.strictly_decreasing && rep.sigma[i + 1] < rep.sigma[i];
    }
    return rep;
}

double edge_mass(const GraphFunction& u, int e) {
    const auto& em = u.mesh().edge_meshes().at(e);
    double m = 0.0;
    for (int k = 0; k < em.intervals; ++k) {
        const double a = u.values()[em.nodes[k]], b = u.values()[em.nodes[k + 1]];
        m += 0.5 * em.h * (a * a + b * b);
    }
    return m;
}

std::vector<BlowupRow> blowup_diagnostics(const std::vector<StationaryState>& states) {
    if (states.size() < 3)
        throw std::invalid_argument("blowup_diagnostics: need at least three states");
    for (size_t i = 1; i < states.size(); ++i)
        if (!(states[i].lambda > states[i - 1].lambda))
            throw std::invalid_argument("blowup_diagnostics: lambda must increase");

    std::vector<BlowupRow> rows;
    for (const StationaryState& s : states) {
        const MetricGraph& g = s.u.mesh().graph();
        const double p = s.p;
        const phase::PhaseParams pp{p, std::sqrt(s.lambda), s.rho};
        const double beta = pp.beta();
        const double lam_pow = std::pow(s.lambda, p / (p - 2.0));
        EdgeHamiltonianReport lv = edge_hamiltonians(s);
        for (int e = 0; e < g.num_edges(); ++e) {
            const double ell = lv.mean[e];
            if (!(ell < -1e-6 * std::abs(beta))) continue;  // tails and flat edges drop out
            BlowupRow row;
            row.lambda = s.lambda;
            row.edge = e;
            row.level = ell;
            row.rescaled_level = ell / lam_pow;
            const double ell_norm = std::pow(s.rho, 2.0 / (p - 2.0)) * row.rescaled_level;
            const double len = g.meshed_length(e);
            if (ell_norm > 1.0 / p - 0.5 && ell_norm < 0.0) {
                row.predictor_asym = -len * phase::kappa_p(p) *
                                     std::pow(s.rho, -2.0 / (p - 2.0)) *
                                     std::pow(s.lambda, 2.0 / (p - 2.0)) / std::log(-ell_norm);
                row.predictor_quad =
                    len * phase::mass_over_period(ell, pp) / phase::period(ell, pp);
            }
            row.actual = edge_mass(s.u, e);
            rows.push_back(row);
        }
    }
    if (rows.empty())
        throw solver_error("blowup_diagnostics: no negative-level edges beyond tolerance");
    return rows;
}

}  // namespace graphnls
