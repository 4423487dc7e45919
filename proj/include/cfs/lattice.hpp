#pragma once

#include "cfs/jets.hpp"

#include <array>

namespace cfs {

/// Lattice model on R^{1,1} x S^1. Points are (t, s, phi).
struct LatticeParams {
    double lambda_A = 5.0;
    double lambda_I = 2.0;
    double eps = 0.2;
    double delta = 1.0;

    /// lambda_A >= 2 lambda_I + eps, lambda_I >= 2, eps in (0, 1/4), delta > 0.
    void validate() const;
    double nu() const { return 2.0 * lambda_A + 4.0 * lambda_I; }
};

double wrap_angle(double phi);
Vec lattice_point(double t, double s, double phi = 0.0);

/// lambda_A chi_A + lambda_I chi_I + V f + delta chi_B V^2 of the difference.
double lattice_lagrangian(const Vec& x, const Vec& y, const LatticeParams& p);
ConfigurationSpace lattice_space(const LatticeParams& p);

/// Unit weights on the T x S window of Z^2 x {0}, t and s centred at 0.
DiscreteMeasure lattice_window(int T, int S);
Model lattice_model(const LatticeParams& p, int T, int S);

struct LatticeElReport {
    ElReport el;                 // support entries are the interior sites only
    int interior_sites = 0;
    double min_off_lattice = 0.0;  // probes with non-integer (t, s)
    double min_phi_offset = 0.0;   // probes on lattice sites with phi != 0
};

/// Default probes around the window centre: fractional offsets and phi offsets.
std::vector<Vec> lattice_probes();
/// ell with nu = 2 lambda_A + 4 lambda_I, by finite neighbour enumeration.
LatticeElReport lattice_el_check(const LatticeParams& p, int T, int S, const std::vector<Vec>& probes);

enum class Boundary { Periodic, Open };

/// Smallest eigenvalue of psi -> lambda_A psi + lambda_I (psi(x + e_t) + psi(x - e_t)) on a T x S window,
/// restricted to vectors orthogonal to the constants.
double lrho_stencil_min(double lambda_A, double lambda_I, int T, int S, Boundary b);
/// Same operator assembled from lattice_lagrangian between window sites.
double lattice_lrho_bound(const LatticeParams& p, int T, int S, Boundary b);

/// Two consecutive time slices (t, t+1) of a lattice jet over s in [s_min, s_min + width).
struct LatticeField {
    int t = 0;
    int s_min = 0;
    bool periodic = false;
    std::vector<double> b0, b1, v0, v1;
    std::array<double, 2> vbar{0.0, 0.0};  // constant R^{1,1} translation, carried unchanged

    static LatticeField zeros(int s_min, int width, bool periodic = false);
    int width() const { return static_cast<int>(b0.size()); }
    int index(int s) const;  // -1 outside an open window
};

/// Advances both slices by `steps` using the scalar recurrence and the discrete wave equation.
LatticeField evolve_linearized(LatticeField state, const LatticeParams& p, int steps);

struct SigmaParts {
    double scalar = 0.0;
    double phi = 0.0;
    double scalar_scale = 0.0;  // sum of |terms|, the floating-point magnitude of the sum
    double phi_scale = 0.0;
    double total() const { return scalar + phi; }
};

/// sigma_t between slices t and t+1 of two jets on the same window.
SigmaParts lattice_sigma_t(const LatticeField& u, const LatticeField& v, const LatticeParams& p);

struct LatticeConservation {
    std::vector<int> t;
    std::vector<double> sigma, sigma_scalar, sigma_phi;
    std::vector<double> drift_scalar, drift_phi;  // |sigma_t - sigma_0| / max(|sigma_0|, term magnitude)
    double max_drift = 0.0;
    double tol = 1e-10;
    bool pass = true;
};

struct InjectedDefect {
    int step = -1;  // after this many steps, add `value` to v^phi at s = 0 on the newest slice
    double value = 0.0;
};

LatticeConservation conservation_report(LatticeField u, LatticeField v, const LatticeParams& p, int steps,
                                        double tol = 1e-10, InjectedDefect defect = {});

/// Random values in [-1, 1] on `width` sites around s = 0 for both slices; open window padded
/// so that `steps` steps stay inside the light cone.
LatticeField random_compact_field(int width, int steps, std::uint64_t seed, bool scalar = true, bool phi = true);

using SiteFunction = std::function<double(int t, int s)>;

/// a(x)[lambda_A b(x) + lambda_I (b(x+e_t) + b(x-e_t))] - u(x) sum_y f(x-y) v(y).
double lattice_weak_el(const LatticeParams& p, int t, int s, double a, double u, const SiteFunction& b,
                       const SiteFunction& vphi);

/// Family (1 + tau b, x + tau (0, 0, vphi)) with values looked up at the nearest site.
VariationFamily lattice_family(const SiteFunction& b, const SiteFunction& vphi);
Jet lattice_jet(const SiteFunction& a, const SiteFunction& uphi);
Jet lattice_translation_jet(double vt, double vs);

}  // namespace cfs
