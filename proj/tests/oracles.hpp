#pragma once

// Test-only oracles, independent of the library's quadrature and solver
// paths: a fixed-step RK4 phase-orbit integrator with event bisection, and
// closed forms for the line soliton.

#include <cmath>
#include <stdexcept>

namespace oracles {

inline double potential(double v, double p, double m, double rho) {
    return rho / p * std::pow(std::abs(v), p) - 0.5 * m * m * v * v;
}

inline double gamma_minus(double p, double m, double rho) {
    return std::pow(rho, -1.0 / (p - 2.0)) * std::pow(m, 2.0 / (p - 2.0));
}

inline double gamma_plus(double p, double m, double rho) {
    return std::pow(p / (2.0 * rho), 1.0 / (p - 2.0)) * std::pow(m, 2.0 / (p - 2.0));
}

struct HalfOrbit {
    double period;   // full period, twice the max-to-min time
    double mass;     // squared L2 norm over the full period
};

/// Integrate v'' = m^2 v - rho v^{p-1} from the upper turning point with an
/// augmented mass variable; the half time/mass are doubled by symmetry.
inline HalfOrbit rk4_orbit(double p, double m, double rho, double ell, double step_scale = 1e-4) {
    double lo = gamma_minus(p, m, rho), hi = gamma_plus(p, m, rho);
    if (!(potential(lo, p, m, rho) <= ell && ell < 0))
        throw std::invalid_argument("rk4_orbit: level outside the positive periodic range");
    for (int i = 0; i < 200; ++i) {
        const double c = 0.5 * (lo + hi);
        (potential(c, p, m, rho) < ell ? lo : hi) = c;
    }
    const double vplus = 0.5 * (lo + hi);

    auto rhs = [&](const double y[3], double dy[3]) {
        dy[0] = y[1];
        dy[1] = m * m * y[0] - rho * std::pow(std::abs(y[0]), p - 2.0) * y[0];
        dy[2] = y[0] * y[0];
    };
    auto rk4 = [&](double y[3], double h) {
        double k1[3], k2[3], k3[3], k4[3], t[3];
        rhs(y, k1);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k1[i];
        rhs(t, k2);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k2[i];
        rhs(t, k3);
        for (int i = 0; i < 3; ++i) t[i] = y[i] + h * k3[i];
        rhs(t, k4);
        for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    };

    const double h = step_scale / std::max(m, 0.5);
    double prev[3] = {vplus, 0.0, 0.0};
    double cur[3] = {vplus, 0.0, 0.0};
    double t = 0.0;
    rk4(cur, h);
    t += h;
    long guard = 0;
    while (cur[1] < 0.0) {
        for (int i = 0; i < 3; ++i) prev[i] = cur[i];
        rk4(cur, h);
        t += h;
        if (++guard > 200'000'000) throw std::runtime_error("rk4_orbit: no turning point found");
    }
    // Bisect the step size from the pre-crossing state.
    double a = 0.0, b = h;
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (a + b);
        double y[3] = {prev[0], prev[1], prev[2]};
        rk4(y, mid);
        (y[1] < 0.0 ? a : b) = mid;
    }
    const double dt = 0.5 * (a + b);
    double fin[3] = {prev[0], prev[1], prev[2]};
    rk4(fin, dt);
    return {2.0 * (t - h + dt), 2.0 * fin[2]};
}

/// Mass of the full-line soliton of -u'' + lambda u = rho u^{p-1}.
inline double line_soliton_mass(double lambda, double rho, double p) {
    const double q = 4.0 / (p - 2.0);
    const double sech_integral =
        std::sqrt(M_PI) * std::tgamma(0.5 * q) / std::tgamma(0.5 * (q + 1.0));
    const double A = std::pow(p * lambda / (2.0 * rho), 1.0 / (p - 2.0));
    const double B = 0.5 * (p - 2.0) * std::sqrt(lambda);
    return A * A / B * sech_integral;
}

/// Pointwise line-soliton profile value at distance d from the peak.
inline double line_soliton_value(double d, double lambda, double rho, double p) {
    const double A = std::pow(p * lambda / (2.0 * rho), 1.0 / (p - 2.0));
    const double B = 0.5 * (p - 2.0) * std::sqrt(lambda);
    return A * std::pow(1.0 / std::cosh(B * d), 2.0 / (p - 2.0));
}

}  // namespace oracles
