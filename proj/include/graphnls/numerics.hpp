#pragma once

#include <functional>
#include <vector>

namespace graphnls::num {

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Bisects until the embedded
/// error estimate meets abs_tol + rel_tol * |integral|.
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-12, double abs_tol = 1e-300, int max_depth = 60);

/// tanh-sinh (double exponential) quadrature on (a,b); integrable endpoint
/// singularities are handled by the substitution itself.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, int max_level = 12);

/// tanh-sinh variant passing the exact distances (x-a, b-x) so integrands
/// singular at an endpoint can avoid the cancellation in reconstructing them.
double tanh_sinh_offsets(const std::function<double(double, double)>& f, double a, double b,
                         double rel_tol = 1e-12, int max_level = 12);

/// Bisection for a sign change of f on [a,b] (f(a), f(b) of opposite sign).
double bisect(const std::function<double(double)>& f, double a, double b,
              double xtol = 1e-15, int max_iter = 200);

/// Dormand-Prince 5(4) adaptive step for autonomous 2d systems
/// y' = f(y), y = (v, w). Used for phase-plane orbits.
struct OdeResult {
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> w;
    bool ok = true;
};

using Rhs2 = std::function<void(const double y[2], double dy[2])>;

/// Integrate from y0 over [0, t_end], recording every accepted step.
/// rel/abs tolerances control the embedded error per step.
OdeResult integrate(const Rhs2& f, const double y0[2], double t_end, double rel_tol = 1e-12,
                    double abs_tol = 1e-14, double max_step = 1e30);

/// Time of the n-th zero crossing of w along the orbit (w = y[1]), refined
/// by bisection on interpolated mini-steps. Returns negative on failure.
double nth_w_zero(const Rhs2& f, const double y0[2], int n, double t_max,
                  double rel_tol = 1e-12, double abs_tol = 1e-14);

}  // namespace graphnls::num
