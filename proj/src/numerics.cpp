#include "graphnls/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphnls::num {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] (Kronrod weights wk,
// embedded 7-point Gauss weights wg on the odd-indexed nodes).
const double gk_x[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
const double gk_wk[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
const double gk_wg[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct GkPanel {
    double integral;
    double error;
};

GkPanel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double ik = 0.0, ig = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + hw * gk_x[i]);
        ik += gk_wk[i] * fx;
        if (i % 2 == 1) ig += gk_wg[i / 2] * fx;
    }
    return {ik * hw, std::abs((ik - ig) * hw)};
}

double gk_recurse(const std::function<double(double)>& f, double a, double b, GkPanel p,
                  double rel_tol, double abs_tol, int depth, double scale) {
    if (depth <= 0 || p.error <= abs_tol + rel_tol * std::abs(scale)) return p.integral;
    const double c = 0.5 * (a + b);
    GkPanel l = gk15(f, a, c), r = gk15(f, c, b);
    return gk_recurse(f, a, c, l, rel_tol, abs_tol * 0.5, depth - 1, scale) +
           gk_recurse(f, c, b, r, rel_tol, abs_tol * 0.5, depth - 1, scale);
}

}  // namespace

double adaptive_gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double abs_tol, int max_depth) {
    GkPanel p = gk15(f, a, b);
    const double scale = std::max(std::abs(p.integral), 1e-300);
    return gk_recurse(f, a, b, p, rel_tol, abs_tol, max_depth, scale);
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_level) {
    // x = c + hw * tanh(pi/2 sinh(t)); weights decay double-exponentially.
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    auto eval = [&](double t, double& x, double& w) {
        const double s = std::sinh(t);
        const double u = std::tanh(0.5 * M_PI * s);
        x = c + hw * u;
        const double ch = std::cosh(0.5 * M_PI * s);
        w = hw * 0.5 * M_PI * std::cosh(t) / (ch * ch);
    };
    double h = 1.0;
    const double t_max = 6.56;  // tanh argument saturates in double precision
    double sum = 0.0;
    for (int k = -static_cast<int>(t_max); k <= static_cast<int>(t_max); ++k) {
        double x, w;
        eval(k * h, x, w);
        if (x <= a || x >= b) continue;
        const double fx = f(x);
        if (std::isfinite(fx)) sum += fx * w;
    }
    double prev = h * sum;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        // Odd multiples of the new h are the fresh abscissae.
        for (int k = 1; k * h <= t_max; k += 2) {
            for (double sgn : {1.0, -1.0}) {
                double x, w;
                eval(sgn * k * h, x, w);
                if (x <= a || x >= b) continue;  // clamped by rounding: skip
                const double fx = f(x);
                if (std::isfinite(fx)) sum += fx * w;
            }
        }
        const double cur = h * sum;
        if (level >= 3 && std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

double tanh_sinh_offsets(const std::function<double(double, double)>& f, double a, double b,
                         double rel_tol, int max_level) {
    const double hw = 0.5 * (b - a);
    // Endpoint distances evaluated through exp(-2y), so they stay accurate
    // when tanh saturates: b - x = hw (1 - tanh y) = 2 hw q/(1+q), q = e^{-2y}.
    auto eval = [&](double t, double& da, double& db, double& w) {
        const double y = 0.5 * M_PI * std::sinh(t);
        const double q = std::exp(-2.0 * std::abs(y));
        const double nearside = 2.0 * hw * q / (1.0 + q);
        const double farside = 2.0 * hw / (1.0 + q);
        if (y >= 0) {
            db = nearside;
            da = farside;
        } else {
            da = nearside;
            db = farside;
        }
        const double ch = std::cosh(y);
        w = hw * 0.5 * M_PI * std::cosh(t) / (ch * ch);
    };
    double h = 1.0;
    const double t_max = 6.56;
    double sum = 0.0;
    auto accumulate = [&](double t) {
        double da, db, w;
        eval(t, da, db, w);
        if (da <= 0.0 || db <= 0.0) return;
        const double fx = f(da, db);
        if (std::isfinite(fx)) sum += fx * w;
    };
    for (int k = -static_cast<int>(t_max); k <= static_cast<int>(t_max); ++k) accumulate(k * h);
    double prev = h * sum;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (int k = 1; k * h <= t_max; k += 2) {
            accumulate(k * h);
            accumulate(-k * h);
        }
        const double cur = h * sum;
        if (level >= 3 && std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

double bisect(const std::function<double(double)>& f, double a, double b, double xtol,
              int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw std::invalid_argument("bisect: no sign change");
    for (int i = 0; i < max_iter; ++i) {
        const double c = 0.5 * (a + b);
        const double fc = f(c);
        if (fc == 0.0 || 0.5 * (b - a) < xtol * std::max(1.0, std::abs(c))) return c;
        if ((fc > 0) == (fa > 0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    return 0.5 * (a + b);
}

namespace {

// Dormand-Prince 5(4) coefficients.
const double dp_c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
const double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
const double dp_b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
const double dp_b4[7] = {5179.0 / 57600,    0.0,           7571.0 / 16695, 393.0 / 640,
                         -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct StepResult {
    double y[2];
    double err;
};

StepResult dp_step(const Rhs2& f, const double y[2], double h) {
    double k[7][2];
    double tmp[2];
    f(y, k[0]);
    for (int s = 1; s < 7; ++s) {
        for (int d = 0; d < 2; ++d) {
            tmp[d] = y[d];
            for (int j = 0; j < s; ++j) tmp[d] += h * dp_a[s][j] * k[j][d];
        }
        f(tmp, k[s]);
    }
    StepResult r{};
    double e[2];
    for (int d = 0; d < 2; ++d) {
        double y5 = y[d], y4 = y[d];
        for (int s = 0; s < 7; ++s) {
            y5 += h * dp_b5[s] * k[s][d];
            y4 += h * dp_b4[s] * k[s][d];
        }
        r.y[d] = y5;
        e[d] = y5 - y4;
    }
    r.err = std::sqrt(0.5 * (e[0] * e[0] + e[1] * e[1]));
    return r;
}

}  // namespace

OdeResult integrate(const Rhs2& f, const double y0[2], double t_end, double rel_tol,
                    double abs_tol, double max_step) {
    OdeResult out;
    double t = 0.0;
    double y[2] = {y0[0], y0[1]};
    out.t.push_back(t);
    out.v.push_back(y[0]);
    out.w.push_back(y[1]);
    double h = std::min(1e-3, t_end * 1e-3);
    if (h <= 0) h = 1e-6;
    int rejects_in_a_row = 0;
    while (t < t_end) {
        h = std::min({h, t_end - t, max_step});
        StepResult s = dp_step(f, y, h);
        const double scale =
            abs_tol + rel_tol * std::max({std::abs(y[0]), std::abs(y[1]), std::abs(s.y[0]),
                                          std::abs(s.y[1])});
        const double ratio = s.err / scale;
        if (ratio <= 1.0) {
            t += h;
            y[0] = s.y[0];
            y[1] = s.y[1];
            out.t.push_back(t);
            out.v.push_back(y[0]);
            out.w.push_back(y[1]);
            rejects_in_a_row = 0;
            h *= std::min(5.0, 0.9 * std::pow(std::max(ratio, 1e-10), -0.2));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(ratio, -0.2));
            if (++rejects_in_a_row > 60 || h < 1e-15 * std::max(1.0, t)) {
                out.ok = false;   // step underflow
                return out;
            }
        }
    }
    return out;
}

double nth_w_zero(const Rhs2& f, const double y0[2], int n, double t_max, double rel_tol,
                  double abs_tol) {
    double t = 0.0;
    double y[2] = {y0[0], y0[1]};
    double h = 1e-4;
    int found = 0;
    int steps = 0;
    const int max_steps = 40'000'000;
    while (t < t_max && steps++ < max_steps) {
        h = std::min(h, t_max - t);
        StepResult s = dp_step(f, y, h);
        const double scale =
            abs_tol + rel_tol * std::max({std::abs(y[0]), std::abs(y[1]), std::abs(s.y[0]),
                                          std::abs(s.y[1])});
        const double ratio = s.err / scale;
        if (ratio > 1.0) {
            h *= std::max(0.1, 0.9 * std::pow(ratio, -0.2));
            continue;
        }
        const bool crossed = (y[1] > 0) != (s.y[1] > 0) || s.y[1] == 0.0;
        if (crossed && t + h > 1e-12) {
            ++found;
            if (found >= n) {
                // Refine within [t, t+h] by bisecting on sub-integrations.
                double lo = 0.0, hi = h;
                double ylo[2] = {y[0], y[1]};
                for (int it = 0; it < 200 && (hi - lo) > 1e-16 * std::max(1.0, t); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    StepResult sm = dp_step(f, ylo, mid - lo);
                    if ((ylo[1] > 0) != (sm.y[1] > 0) || sm.y[1] == 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        ylo[0] = sm.y[0];
                        ylo[1] = sm.y[1];
                    }
                }
                return t + 0.5 * (lo + hi);
            }
        }
        t += h;
        y[0] = s.y[0];
        y[1] = s.y[1];
        h *= std::min(5.0, 0.9 * std::pow(std::max(ratio, 1e-10), -0.2));
    }
    return -1.0;
}

}  // namespace graphnls::num
