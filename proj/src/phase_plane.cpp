#include "graphnls/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graphnls/numerics.hpp"

namespace graphnls::phase {

void PhaseParams::validate(bool need_supercritical) const {
    if (!(p > 2.0)) throw std::invalid_argument("phase: p must exceed 2");
    if (need_supercritical && !(p > 6.0))
        throw std::invalid_argument("phase: p must exceed 6 for this operation");
    if (!(rho > 0.0) || rho > 1.0) throw std::invalid_argument("phase: rho must be in (0,1]");
    if (m < 0.0) throw std::invalid_argument("phase: m must be nonnegative");
}

double PhaseParams::gamma_plus() const {
    return std::pow(p / (2.0 * rho), 1.0 / (p - 2.0)) * std::pow(m, 2.0 / (p - 2.0));
}

double PhaseParams::gamma_minus() const {
    return std::pow(rho, -1.0 / (p - 2.0)) * std::pow(m, 2.0 / (p - 2.0));
}

double PhaseParams::beta() const {
    return (1.0 / p - 0.5) * std::pow(rho, -2.0 / (p - 2.0)) *
           std::pow(m, 2.0 * p / (p - 2.0));
}

double potential(double v, const PhaseParams& pp) {
    return pp.rho / pp.p * std::pow(std::abs(v), pp.p) - 0.5 * pp.m * pp.m * v * v;
}

double potential_deriv(double v, const PhaseParams& pp) {
    return pp.rho * std::pow(std::abs(v), pp.p - 2.0) * v - pp.m * pp.m * v;
}

double hamiltonian(double v, double dv, const PhaseParams& pp) {
    return 0.5 * dv * dv + potential(v, pp);
}

std::string to_string(LevelClass c) {
    switch (c) {
        case LevelClass::Empty: return "empty";
        case LevelClass::EquilibriumMinimum: return "equilibrium";
        case LevelClass::PositivePeriodic: return "positive_periodic";
        case LevelClass::Homoclinic: return "homoclinic";
        case LevelClass::SignChangingPeriodic: return "sign_changing_periodic";
    }
    return "?";
}

namespace {

// Bisection bracket for pi(v) = ell, polished by a few Newton steps.
double turning_point(double ell, const PhaseParams& pp, double lo, double hi) {
    auto f = [&](double v) { return potential(v, pp) - ell; };
    double v = num::bisect(f, lo, hi, 1e-15);
    for (int it = 0; it < 4; ++it) {
        const double d = potential_deriv(v, pp);
        if (d == 0.0) break;
        const double step = f(v) / d;
        const double vn = v - step;
        if (vn <= std::min(lo, hi) || vn >= std::max(lo, hi)) break;
        v = vn;
        if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(v))) break;
    }
    return v;
}

}  // namespace

PhaseLevel classify_level(double ell, const PhaseParams& pp) {
    pp.validate();
    PhaseLevel lv;
    lv.params = pp;
    lv.ell = ell;
    lv.gamma_minus = pp.gamma_minus();
    lv.gamma_plus = pp.gamma_plus();
    lv.beta = pp.beta();

    const double scale = std::max(std::abs(lv.beta), 1e-300);
    if (pp.m == 0.0) {
        // Degenerate well: pi(v) = (rho/p)|v|^p >= 0, bottom at zero, so the
        // zero level carries only the zero orbit.
        if (ell < 0.0) {
            lv.cls = LevelClass::Empty;
        } else if (ell == 0.0) {
            lv.cls = LevelClass::EquilibriumMinimum;
        } else {
            lv.cls = LevelClass::SignChangingPeriodic;
            lv.v_plus = std::pow(pp.p * ell / pp.rho, 1.0 / pp.p);
            lv.v_minus = -lv.v_plus;
        }
        return lv;
    }

    if (ell < lv.beta - 1e-14 * scale) {
        lv.cls = LevelClass::Empty;
    } else if (ell <= lv.beta + 1e-14 * scale) {
        lv.cls = LevelClass::EquilibriumMinimum;
        lv.v_minus = lv.v_plus = lv.gamma_minus;
    } else if (std::abs(ell) <= 1e-14 * scale) {
        lv.cls = LevelClass::Homoclinic;
        lv.v_minus = 0.0;
        lv.v_plus = lv.gamma_plus;
    } else if (ell < 0.0) {
        lv.cls = LevelClass::PositivePeriodic;
        lv.v_minus = turning_point(ell, pp, 1e-300, lv.gamma_minus);
        lv.v_plus = turning_point(ell, pp, lv.gamma_minus, lv.gamma_plus);
    } else {
        lv.cls = LevelClass::SignChangingPeriodic;
        double hi = lv.gamma_plus;
        while (potential(hi, pp) < ell) hi *= 2.0;
        lv.v_plus = turning_point(ell, pp, lv.gamma_plus, hi);
        lv.v_minus = -lv.v_plus;
    }
    return lv;
}

double inverse_g(double z, double p) {
    const double z0 = 1.0 / p - 0.5;
    if (z < z0 - 1e-15 || z > 1e-15) throw std::invalid_argument("inverse_g: z outside [1/p-1/2, 0]");
    z = std::clamp(z, z0, 0.0);
    PhaseParams pp{p, 1.0, 1.0};
    if (z == 0.0) return 0.0;
    if (z == z0) return 1.0;
    auto f = [&](double v) { return potential(v, pp) - z; };
    double v = num::bisect(f, 0.0, 1.0, 1e-16);
    for (int it = 0; it < 4; ++it) {
        const double d = potential_deriv(v, pp);
        if (d == 0.0) break;
        const double vn = v - f(v) / d;
        if (vn <= 0.0 || vn >= 1.0) break;
        v = vn;
    }
    return v;
}

std::vector<double> g_edge_asymptotic_check(double p, const std::vector<double>& zs) {
    if (!(p > 6.0)) throw std::invalid_argument("g_edge_asymptotic_check: needs p > 6");
    const double z0 = 1.0 / p - 0.5;
    // z - z0 = (1/2) pi''(1) (1-g)^2 + O((1-g)^3) with pi''(1) = p - 2.
    const double coeff = 2.0 / (p - 2.0);
    std::vector<double> ratios;
    ratios.reserve(zs.size());
    for (double z : zs) {
        const double off = z - z0;
        if (off < 0) throw std::invalid_argument("g_edge_asymptotic_check: z below endpoint");
        if (off == 0.0) {
            ratios.push_back(1.0);  // both sides vanish; limit convention
            continue;
        }
        const double g = inverse_g(z, p);
        ratios.push_back((1.0 - g) / std::sqrt(coeff * off));
    }
    return ratios;
}

namespace {

// Half-orbit integral  int_{vlo}^{vhi} F(v) dv / sqrt(2 (ell - pi(v)))  with
// simple zeros of ell - pi at both ends, regularized by
// v = vlo + (vhi - vlo) sin^2(theta).
double half_orbit_integral(const PhaseParams& pp, double ell, double vlo, double vhi,
                           const std::function<double(double)>& F, double rel_tol) {
    const double span = vhi - vlo;
    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double v = vlo + span * s * s;
        const double d = ell - potential(v, pp);
        if (d <= 0.0) return 0.0;  // sub-rounding sliver at the turning points
        return F(v) * span * std::sin(2.0 * theta) / std::sqrt(2.0 * d);
    };
    return num::adaptive_gk(integrand, 0.0, 0.5 * M_PI, rel_tol, 1e-300, 48);
}

PhaseLevel periodic_level(double ell, const PhaseParams& pp, const char* who) {
    PhaseLevel lv = classify_level(ell, pp);
    if (lv.cls != LevelClass::PositivePeriodic && lv.cls != LevelClass::SignChangingPeriodic)
        throw std::invalid_argument(std::string(who) + ": level is not periodic (" +
                                    to_string(lv.cls) + ")");
    return lv;
}

}  // namespace

double period(double ell, const PhaseParams& pp) {
    PhaseLevel lv = periodic_level(ell, pp, "period");
    return 2.0 * half_orbit_integral(pp, ell, lv.v_minus, lv.v_plus,
                                     [](double) { return 1.0; }, 1e-11);
}

double mass_over_period(double ell, const PhaseParams& pp) {
    PhaseLevel lv = periodic_level(ell, pp, "mass_over_period");
    return 2.0 * half_orbit_integral(pp, ell, lv.v_minus, lv.v_plus,
                                     [](double v) { return v * v; }, 1e-11);
}

double kappa_p(double p) {
    if (!(p > 2.0)) throw std::invalid_argument("kappa_p: p must exceed 2");
    PhaseParams pp{p, 1.0, 1.0};
    return half_orbit_integral(pp, 0.0, 0.0, pp.gamma_plus(),
                               [](double v) { return v * v; }, 1e-12);
}

double kappa_p_tanh_sinh(double p) {
    if (!(p > 2.0)) throw std::invalid_argument("kappa_p: p must exceed 2");
    PhaseParams pp{p, 1.0, 1.0};
    const double gp = pp.gamma_plus();
    // -2 pi(v) = v^2 (1 - (v/gp)^{p-2}); the bracket evaluated through
    // expm1/log1p stays accurate at both endpoints.
    auto integrand = [&](double da, double db) {
        const double v = da;
        const double bracket = -std::expm1((p - 2.0) * std::log1p(-db / gp));
        if (v <= 0.0 || bracket <= 0.0) return 0.0;
        return v / std::sqrt(bracket);
    };
    return num::tanh_sinh_offsets(integrand, 0.0, gp, 1e-13, 14);
}

ScalingMap scaling_map(const PhaseParams& pp, double ell) {
    pp.validate();
    if (!(pp.m > 0.0)) throw std::invalid_argument("scaling_map: m must be positive");
    ScalingMap sm;
    const double e = pp.p - 2.0;
    sm.ell_11 = std::pow(pp.rho, 2.0 / e) * std::pow(pp.m, -2.0 * pp.p / e) * ell;
    sm.amplitude = std::pow(pp.rho, -1.0 / e) * std::pow(pp.m, 2.0 / e);
    sm.length = 1.0 / pp.m;

    PhaseLevel lv = classify_level(ell, pp);
    if (lv.cls == LevelClass::PositivePeriodic || lv.cls == LevelClass::SignChangingPeriodic) {
        const double t_here = period(ell, pp);
        const double t_norm = period(sm.ell_11, PhaseParams{pp.p, 1.0, 1.0});
        sm.period_defect = std::abs(t_here - sm.length * t_norm) / t_here;
    }
    return sm;
}

OrbitReport orbit_properties(double ell, const PhaseParams& pp, int periods) {
    OrbitReport rep;
    rep.level = classify_level(ell, pp);
    const PhaseLevel& lv = rep.level;
    const double scale = std::max(std::abs(ell), std::max(std::abs(lv.beta), 1e-300));

    if (lv.cls == LevelClass::Empty) {
        rep.note = "empty level set: no orbit";
        return rep;
    }
    if (lv.cls == LevelClass::EquilibriumMinimum) {
        rep.min_v = rep.max_v = lv.v_plus;
        rep.note = pp.m == 0.0 ? "only the zero orbit" : "constant orbit at gamma_minus";
        return rep;
    }

    num::Rhs2 rhs = [&pp](const double y[2], double dy[2]) {
        dy[0] = y[1];
        dy[1] = pp.m * pp.m * y[0] - pp.rho * std::pow(std::abs(y[0]), pp.p - 2.0) * y[0];
    };
    const double y0[2] = {lv.v_plus, 0.0};

    double t_end;
    if (lv.cls == LevelClass::Homoclinic) {
        // The nominal 40/m horizon is capped: past |ln rtol|/(2m) ~ 13/m the
        // e^{mt} error mode of the saddle overtakes the decaying tail.
        rep.decay_threshold = 1e-4 * lv.gamma_plus;
        t_end = 13.0 / pp.m;
    } else {
        t_end = periods * period(ell, pp);
    }

    num::OdeResult orb = num::integrate(rhs, y0, t_end, 1e-12, 1e-14 * lv.v_plus);
    rep.integrated = true;
    rep.ok = orb.ok;
    if (!orb.ok) {
        rep.note = "integration step underflow";
        return rep;
    }

    rep.min_v = *std::min_element(orb.v.begin(), orb.v.end());
    rep.max_v = *std::max_element(orb.v.begin(), orb.v.end());
    double drift = 0.0;
    for (size_t i = 0; i < orb.v.size(); ++i)
        drift = std::max(drift, std::abs(hamiltonian(orb.v[i], orb.w[i], pp) - ell));
    rep.hamiltonian_drift = drift / scale;

    if (lv.cls == LevelClass::Homoclinic) {
        double sup = 0.0;
        for (size_t i = 0; i < orb.t.size(); ++i)
            if (orb.t[i] >= 12.0 / pp.m) sup = std::max(sup, std::abs(orb.v[i]));
        rep.decay_sup = sup;
        rep.decay_ok = sup <= rep.decay_threshold;
        return rep;
    }

    // Symmetry about the first critical point: v(tc + s) == v(tc - s).
    const double tc = num::nth_w_zero(rhs, y0, 1, t_end);
    if (tc > 0) {
        auto value_at = [&](double t) {
            num::OdeResult r = num::integrate(rhs, y0, t, 1e-12, 1e-14 * lv.v_plus);
            return r.v.back();
        };
        const double T = t_end / periods;
        double defect = 0.0;
        for (double frac : {0.11, 0.23, 0.37}) {
            const double s = frac * T;
            if (tc - s <= 0) continue;
            defect = std::max(defect, std::abs(value_at(tc + s) - value_at(tc - s)));
        }
        rep.symmetry_defect = defect / lv.v_plus;
    }
    return rep;
}

}  // namespace graphnls::phase
