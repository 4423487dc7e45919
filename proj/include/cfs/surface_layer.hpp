#pragma once

#include "cfs/jets.hpp"

#include <string>

namespace cfs {

struct RegionSplit {
    std::vector<int> omega;
    std::vector<int> complement;

    /// Validates indices (in range, no duplicates) and fills the complement.
    static RegionSplit from_omega(std::vector<int> omega, std::size_t size);
};

using PairFunction = std::function<double(const Vec&, const Vec&)>;
using Flow = std::function<Vec(double, const Vec&)>;

/// sum_{i in omega} sum_{j not in omega} w_i w_j integrand(x_i, x_j).
double surface_layer_integral(const DiscreteMeasure& m, const RegionSplit& split, const PairFunction& integrand);

enum class SymmetryMode { Lagrangian, Measure, Gis, Killing };
SymmetryMode parse_symmetry_mode(const std::string& name);
const char* to_string(SymmetryMode mode);

/// Largest violation over the sampled taus. Lagrangian: max |L(x, Phi_tau y) - L(Phi_-tau x, y)| over support
/// pairs. Measure: matching distance of transported support points plus weight mismatch. Gis: |sum_M sum_Omega
/// (L(Phi_tau x, y) - L(x, y))| (needs `split`).
double symmetry_check(const Model& model, const Flow& flow, SymmetryMode mode, const std::vector<double>& taus,
                      const RegionSplit* split = nullptr);

struct NoetherOptions {
    double h = 1e-4;
    int levels = 5;
    double tol = -1.0;       // < 0: pairs * max|L| * h^2
    bool check_symmetry = true;
    Flow killing_f;          // measure-preserving transformation for killing mode
};

struct ConservationReport {
    std::string mode;
    double derivative_estimate = 0.0;
    double error_estimate = 0.0;
    double h_used = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double symmetry_violation = 0.0;
    // bookkeeping identity at tau = h
    double nid1 = 0.0, nid2 = 0.0, nid3 = 0.0;
};

/// Central-difference derivative at tau = 0 of the mode's surface-layer integral.
/// Lagrangian: L(Phi_tau x, y) - L(Phi_-tau x, y). Measure / gis: L(Phi_tau x, y) - L(x, Phi_tau y).
/// Killing: L_k(f x, y) - L_k(x, f y) - L_k(Phi x, y) + L_k(x, Phi y).
ConservationReport noether_derivative(const Model& model, const Flow& flow, const RegionSplit& split,
                                      SymmetryMode mode, const NoetherOptions& opt = {});

struct BookkeepingIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double nid2 = 0.0;
    double nid3 = 0.0;
    double scale = 0.0;  // sum of the magnitudes of all summands
};

/// lhs = sum_M sum_Omega (L(Phi x, y) - L(x, y)); rhs = sum_Omega (ell(Phi x) - ell(x)) - sum_Omega sum_{M\Omega}
/// (L(Phi x, y) - L(x, Phi y)).
BookkeepingIdentity prpuseful_identity(const Model& model, const Flow& flow, const RegionSplit& split, double tau);

/// Surface-layer integral of (nabla~_{1,u} nabla~_{2,v} - nabla~_{1,v} nabla~_{2,u}) L over Omega x (M \ Omega).
/// Equal steps in both slots by default; a small ratio loses digits to cancellation in the mixed quotient.
double sigma_omega(const Model& model, const RegionSplit& split, const Jet& u, const Jet& v,
                   const NestedSchedule& sched = {1e-2, 5, 1.0});

struct BalanceReport {
    double sigma = 0.0;
    double chi_tilde_sum = 0.0;
    double commutator_term = 0.0;
    double residual = 0.0;   // sigma - (chi_tilde_sum - commutator_term)
    double alt_form = 0.0;   // alternative expression for sigma
    double scale = 1.0;
};

BalanceReport nondiff_symplectic_balance(const Model& model, const VariationFamily& w, const VariationFamily& v,
                                         const RegionSplit& split, const NestedSchedule& sched = {});

/// Operator-space orbit x_k = V_k x0 V_k^-1 with V_k = exp(i theta_k G), theta_k = 2 pi k / N, unit total weight.
DiscreteMeasure unitary_orbit_measure(const CfsPoint& x0, const CMat& G, int N);
/// Phi_tau(x) = exp(i tau A) x exp(-i tau A) on packed Hermitian matrices.
Flow conjugation_flow(const CMat& A);
/// Rotations of S^2 as a Flow.
Flow rotation_flow(const Vec& axis);
/// Rotation about `axis` by tau c^2 (1 - c^2), c = <axis, x>: fixes the axis, its equator and their poles.
Flow pinned_rotation_flow(const Vec& axis);
Flow identity_flow();

}  // namespace cfs
