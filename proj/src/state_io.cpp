#include "graphnls/state_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace graphnls {

void VerificationReport::add(const std::string& name, double value, const std::string& criterion,
                             bool ok) {
    checks.push_back({name, value, criterion, ok});
    if (!ok && pass) {
        pass = false;
        first_failure = name;
    }
}

VerificationReport verify_state(const StationaryState& s, std::optional<double> mass_target,
                                bool with_morse) {
    VerificationReport rep;
    rep.add("lambda_positive", s.lambda, "> 0", s.lambda > 0.0);

    double min_free = std::numeric_limits<double>::infinity();
    if (s.ops) {
        for (int i = 0; i < s.ops->dim(); ++i)
            min_free = std::min(min_free, s.u.values()[s.ops->free_nodes[i]]);
    } else {
        min_free = s.u.values().minCoeff();
    }
    rep.add("positivity_min_u", min_free, "> 0", min_free > 0.0);

    rep.add("newton_residual_rel", s.residual, "<= 1e-10", s.residual <= 1e-10);

    if (mass_target) {
        const double err = std::abs(s.mass - *mass_target) / *mass_target;
        rep.add("mass_rel_error", err, "<= 1e-8", err <= 1e-8);
    }

    const double a = h1_semi_sq(s.u);
    const double poh = pohozaev_residual(s.u, s.lambda, s.rho, s.p);
    const double poh_scale = a + std::abs(s.lambda) * l2_norm_sq(s.u);
    rep.add("pohozaev_rel", std::abs(poh) / std::max(poh_scale, 1e-300), "<= 1e-6",
            std::abs(poh) <= 1e-6 * poh_scale);

    const double lam_back = lagrange_multiplier(s.u, s.rho, s.p);
    const double lam_err = std::abs(lam_back - s.lambda) / std::max(std::abs(s.lambda), 1e-300);
    rep.add("lagrange_multiplier_rel", lam_err, "<= 1e-8", lam_err <= 1e-8);

    const ActionIdentityReport act = action_identity_check(s);
    rep.add("action_energy_form_rel", act.energy_form_residual, "<= 1e-6",
            act.energy_form_residual <= 1e-6);
    rep.add("action_action_form_rel", act.action_form_residual, "<= 1e-6",
            act.action_form_residual <= 1e-6);
    rep.add("action_combined_rel", act.combined_residual, "<= 1e-6",
            act.combined_residual <= 1e-6);

    const EdgeHamiltonianReport lv = edge_hamiltonians(s);
    rep.add("edge_constancy_rel", lv.worst_rel_dev, "<= 1e-5", lv.worst_rel_dev <= 1e-5);

    const FluxReport flux = kirchhoff_flux(s);
    rep.add("kirchhoff_flux_rel", flux.max_rel, "<= 1e-6", flux.max_rel <= 1e-6);

    const CorollaryReport cor = corollary_bound_check(s);
    const double cor_scale = std::max({std::abs(cor.lhs), std::abs(cor.rhs), 1.0});
    rep.add("corollary_slack", cor.slack, ">= -1e-6*scale", cor.slack >= -1e-6 * cor_scale);

    if (with_morse) {
        const IndexCertificate cert = index_certificate(s);
        rep.add("morse_index_theta0", cert.index_theta0, "<= 1", cert.index_theta0 <= 1);
        rep.add("morse_index_theta1e-8", cert.index_theta, "<= 1", cert.index_theta <= 1);
    }
    return rep;
}

std::string format_report(const VerificationReport& rep) {
    std::ostringstream out;
    out << "# verification report\n";
    char buf[160];
    for (const Check& c : rep.checks) {
        std::snprintf(buf, sizeof buf, "%-28s %.17g  [%s]  %s\n", c.name.c_str(), c.value,
                      c.criterion.c_str(), c.pass ? "PASS" : "FAIL");
        out << buf;
    }
    out << "overall " << (rep.pass ? "PASS" : std::string("FAIL ") + rep.first_failure) << "\n";
    return out.str();
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string write_state_file(const StationaryState& s, const StateFileMeta& meta) {
    std::ostringstream out;
    out << "# graphnls state\nformat 1\n";
    out << "p " << fmt(s.p) << "\n";
    out << "rho " << fmt(s.rho) << "\n";
    out << "lambda " << fmt(s.lambda) << "\n";
    out << "mass " << fmt(s.mass) << "\n";
    out << "energy " << fmt(s.energy) << "\n";
    out << "action " << fmt(s.action) << "\n";
    out << "residual " << fmt(s.residual) << "\n";
    out << "h " << fmt(meta.h) << "\n";
    out << "truncation " << fmt(meta.truncation) << "\n";
    out << "far_bc " << (meta.far_bc == FarBc::Dirichlet ? "dirichlet" : "neumann") << "\n";
    if (meta.mass_target) out << "mass_target " << fmt(*meta.mass_target) << "\n";
    out << "seed " << meta.seed << "\n";
    out << "begin graph\n" << serialize_graph(s.u.mesh().graph()) << "end graph\n";
    out << "begin values\n" << dump_function_csv(s.u) << "end values\n";
    return out.str();
}

LoadedState read_state_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    LoadedState out;
    double p = 0, rho = 1, lambda = 0;
    std::string graph_text, values_text;
    enum { Meta, Graph, Values } mode = Meta;
    while (std::getline(in, line)) {
        if (mode == Meta) {
            if (line == "begin graph") {
                mode = Graph;
                continue;
            }
            if (line == "begin values") {
                mode = Values;
                continue;
            }
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string key;
            ls >> key;
            if (key == "p") ls >> p;
            else if (key == "rho") ls >> rho;
            else if (key == "lambda") ls >> lambda;
            else if (key == "h") ls >> out.meta.h;
            else if (key == "truncation") ls >> out.meta.truncation;
            else if (key == "mass_target") {
                double t;
                ls >> t;
                out.meta.mass_target = t;
            } else if (key == "seed") ls >> out.meta.seed;
            else if (key == "far_bc") {
                std::string bc;
                ls >> bc;
                out.meta.far_bc = bc == "neumann" ? FarBc::Neumann : FarBc::Dirichlet;
            }
            // format/mass/energy/action/residual are recomputed below
        } else if (mode == Graph) {
            if (line == "end graph") {
                mode = Meta;
                continue;
            }
            graph_text += line + "\n";
        } else {
            if (line == "end values") {
                mode = Meta;
                continue;
            }
            values_text += line + "\n";
        }
    }
    if (graph_text.empty() || values_text.empty())
        throw std::runtime_error("state file: missing graph or values block");

    MetricGraph g = parse_graph(graph_text);
    g.truncation_length = out.meta.truncation;
    g.finalize();
    auto ops = std::make_shared<DiscreteOperators>(assemble(g, out.meta.h, out.meta.far_bc));
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(ops->mesh->num_nodes());

    std::istringstream vin(values_text);
    std::getline(vin, line);  // header
    while (std::getline(vin, line)) {
        if (line.empty()) continue;
        int e;
        double s, v;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &e, &s, &v) != 3)
            throw std::runtime_error("state file: malformed values row: " + line);
        if (e < 0 || e >= static_cast<int>(ops->mesh->edge_meshes().size()))
            throw std::runtime_error("state file: edge id out of range");
        const auto& em = ops->mesh->edge_meshes()[e];
        const int k = static_cast<int>(std::lround(s / em.h));
        if (k < 0 || k > em.intervals || std::abs(s - k * em.h) > 1e-9 * std::max(1.0, s))
            throw std::runtime_error("state file: arclength off the mesh: " + line);
        vals[em.nodes[k]] = v;
    }

    StationaryState st;
    st.ops = ops;
    st.u = GraphFunction(ops->mesh, std::move(vals));
    st.lambda = lambda;
    st.rho = rho;
    st.p = p;
    st.mass = l2_norm_sq(st.u);
    const double a = h1_semi_sq(st.u);
    const double P = lp_integral(st.u, p);
    st.energy = 0.5 * a - rho / p * P;
    st.action = 0.5 * a + rho / p * P - 0.5 * lambda * st.mass;
    // Recompute the weak-form residual so verify sees tampering.
    {
        const auto& K = ops->stiffness;
        const Eigen::SparseMatrix<double> absK = K.cwiseAbs();
        Eigen::VectorXd x = ops->restrict_to_free(st.u.values());
        Eigen::VectorXd d(ops->dim());
        for (int i = 0; i < ops->dim(); ++i)
            d[i] = ops->mesh->quadrature_weights()[ops->free_nodes[i]];
        Eigen::VectorXd pw(x.size());
        for (int i = 0; i < x.size(); ++i)
            pw[i] = std::pow(std::abs(x[i]), p - 2.0) * x[i];
        Eigen::VectorXd r = K * x + lambda * d.cwiseProduct(x) - rho * d.cwiseProduct(pw);
        const Eigen::VectorXd ax = x.cwiseAbs();
        Eigen::VectorXd apw(x.size());
        for (int i = 0; i < x.size(); ++i) apw[i] = std::pow(ax[i], p - 1.0);
        const double scale = (absK * ax + std::abs(lambda) * d.cwiseProduct(ax) +
                              rho * d.cwiseProduct(apw))
                                 .norm();
        st.residual = scale > 0 ? r.norm() / scale : 0.0;
    }
    st.edge_levels = edge_hamiltonians(st).mean;
    out.state = st;
    return out;
}

LoadedState load_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open state file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_state_file(ss.str());
}

}  // namespace graphnls
