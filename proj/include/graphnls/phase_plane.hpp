#pragma once

#include <string>
#include <vector>

namespace graphnls::phase {

/// Parameters of the edge ODE v'' = m^2 v - rho |v|^{p-2} v.
/// m^2 plays the role of the frequency lambda of the stationary problem.
struct PhaseParams {
    double p = 8.0;     // nonlinearity exponent
    double m = 1.0;     // frequency root, m^2 = lambda; m >= 0
    double rho = 1.0;   // nonlinearity weight, in (0, 1]

    void validate(bool need_supercritical = false) const;

    double gamma_plus() const;   // positive zero of the potential
    double gamma_minus() const;  // positive minimum of the potential
    double beta() const;         // well depth, potential at gamma_minus
};

/// Potential pi(v) = (rho/p)|v|^p - (m^2/2) v^2.
double potential(double v, const PhaseParams& pp);
double potential_deriv(double v, const PhaseParams& pp);

/// Hamiltonian level of a phase point: 0.5 dv^2 + pi(v).
double hamiltonian(double v, double dv, const PhaseParams& pp);

enum class LevelClass {
    Empty,                 // below the well bottom
    EquilibriumMinimum,    // exactly the well bottom: constant orbit
    PositivePeriodic,      // negative level: positive oscillation in (v-,v+)
    Homoclinic,            // zero level: peak gamma_plus, decays to zero
    SignChangingPeriodic,  // positive level: symmetric oscillation (-v+,v+)
};

std::string to_string(LevelClass c);

struct PhaseLevel {
    PhaseParams params;
    double ell = 0.0;
    LevelClass cls = LevelClass::Empty;
    double v_minus = 0.0;   // lower turning point when defined
    double v_plus = 0.0;    // upper turning point / peak when defined
    double gamma_minus = 0.0;
    double gamma_plus = 0.0;
    double beta = 0.0;
};

/// Classify the level set of the potential at value ell and compute turning
/// points. Ties at the well bottom and at zero are resolved within 1e-14
/// relative.
PhaseLevel classify_level(double ell, const PhaseParams& pp);

/// Inverse of the (1,1)-potential restricted to [0,1] -> [1/p-1/2, 0].
/// |pi(g(z)) - z| <= 1e-13 on the admissible range; throws outside it.
double inverse_g(double z, double p);

/// Ratio of (1 - g(z)) against its square-root expansion
/// sqrt(2 (z - z0) / (p - 2)) at the left endpoint z0 = 1/p - 1/2; tends to 1
/// as z -> z0+. The exact endpoint maps to 1 by convention. Requires p > 6.
std::vector<double> g_edge_asymptotic_check(double p, const std::vector<double>& zs);

/// Period of the orbit at level ell (positive periodic levels and positive
/// levels). Singularity-absorbing quadrature, ~1e-9 relative.
double period(double ell, const PhaseParams& pp);

/// Squared L^2 norm of the orbit over one period.
double mass_over_period(double ell, const PhaseParams& pp);

/// Limit of half the mass-per-period as the level tends to zero from below
/// (homoclinic half-mass at m = rho = 1).
double kappa_p(double p);
/// Same value by the independent tanh-sinh scheme, for cross-checks.
double kappa_p_tanh_sinh(double p);

struct ScalingMap {
    double ell_11 = 0.0;          // level seen by the (1,1) normal form
    double amplitude = 0.0;       // v = amplitude * v_11(x / length)
    double length = 0.0;          // spatial dilation factor, 1/m
    double period_defect = 0.0;   // |T_{m,rho}(ell) - length*T_{1,1}(ell_11)| / T
};

/// Reduce (m, rho, ell) to the (1,1) normal form and verify the period
/// scaling law numerically (defect reported, not asserted).
ScalingMap scaling_map(const PhaseParams& pp, double ell);

struct OrbitReport {
    PhaseLevel level;
    bool integrated = false;
    bool ok = true;                     // step underflow or setup failure
    double hamiltonian_drift = 0.0;     // relative to max(|ell|, |beta|)
    double min_v = 0.0;
    double max_v = 0.0;
    double symmetry_defect = 0.0;       // v(tc+s) vs v(tc-s) about a critical point
    double decay_sup = 0.0;             // homoclinic: sup |v| over the late window
    double decay_threshold = 0.0;
    bool decay_ok = false;
    std::string note;
};

/// Integrate the orbit through several periods and check conservation,
/// symmetry, boundedness and the sign pattern of its class.
OrbitReport orbit_properties(double ell, const PhaseParams& pp, int periods = 10);

}  // namespace graphnls::phase
