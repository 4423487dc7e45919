#pragma once

#include "cfs/measure.hpp"

#include <functional>

namespace cfs {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

/// Step sequence h_k = h0 * 2^-k, k = 0..levels-1.
struct HSchedule {
    double h0 = 1e-3;
    int levels = 7;
};

/// Outer step s_k = s0 * 2^-k; inner (tau or second-argument) step = ratio * s_k.
struct NestedSchedule {
    double s0 = 1e-2;
    int levels = 5;
    double ratio = 1e-2;
};

struct Extrapolation {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int divergence = 0;  // +1 / -1 when the quotient grows like 1/h
};

/// Richardson table over h_k for a quotient with an expansion in integer powers
/// of h. Returns the diagonal entry with the smallest error estimate.
Extrapolation extrapolate(const std::function<double(double)>& quotient, const HSchedule& sched,
                          double tol_rel = 1e-3, double tol_abs = 1e-7);

enum class Side { Plus, Minus };

/// One-sided derivative along the retraction curve. D^-_v f = -D^+_{-v} f.
/// A jump yields +-infinity; other disagreement throws NonConvergent.
double semi_derivative(const ScalarField& fn, const Vec& x, const Vec& dir, Side side,
                       const ConfigurationSpace& space, const HSchedule& sched = {});

/// (D^+_v - D^+_{-v}) / 2.
double symmetric_semi_derivative(const ScalarField& fn, const Vec& x, const Vec& dir,
                                 const ConfigurationSpace& space, const HSchedule& sched = {});

/// Point reached by integrating a vector field for time s with `steps` retraction steps.
Vec flow(const ConfigurationSpace& space, const VectorField& field, const Vec& x, double s, int steps = 8);

/// A one-jet (scalar, vector field).
struct Jet {
    ScalarField scalar;
    VectorField vector;

    Jet negated() const;
    static Jet scalar_only(ScalarField a, int ambient_dim);
    static Jet vector_only(VectorField u);
};

/// rho_tau = (F_tau)_*(f_tau rho) with f(0,.) = 1 and F(0,.) = id.
struct VariationFamily {
    std::function<double(double, const Vec&)> f;
    std::function<Vec(double, const Vec&)> F;
    bool is_flow = false;
    Jet generator;  // (d/dtau f, d/dtau F) at tau = 0

    VariationFamily reversed() const;
};

/// Rotations of S^2 about `axis` with unit angular speed.
VariationFamily rotation_family(const Vec& axis);
/// Rotation family with weights f_tau(x) = exp(tau c(x)).
VariationFamily weighted_rotation_family(const Vec& axis, ScalarField c);
Eigen::Matrix3d rotation_matrix(const Vec& axis, double angle);

struct SemiDerivReport {
    double plus = 0.0;
    double minus = 0.0;
    double symmetric = 0.0;
    bool differentiable = false;
    double h_used = 0.0;
};

/// nabla^{+-}_u ell(x) = a(x) ell(x) + D^{+-}_u ell(x).
SemiDerivReport nabla_jet(const ScalarField& ellfn, const Jet& jet, const Vec& x, const ConfigurationSpace& space,
                          const HSchedule& sched = {}, double tol_diff = 1e-6, double tol_abs = 1e-8);

/// <u, Delta v>(x): nabla_u of sum_j w_j (nabla_{1,v} + nabla_{2,v}) L(x, x_j) - nabla_v nu/2,
/// with symmetric derivatives in both tau and the u-direction.
double linearized_residual(const Model& model, const VariationFamily& v, const Jet& u, const Vec& x,
                           const NestedSchedule& sched = {});

/// ell_tau(z) = sum_j w_j f_tau(x_j) L(z, F_tau(x_j)) - nu/2.
double ell_tau(const Model& model, const VariationFamily& family, double tau, const Vec& z);

/// chi_{w,v}(x) = 1/2 d/ds+ d/dtau+ f_tau(x) [ell_tau(F_tau Phi_s x) - ell_tau(F_tau Phi_-s x)],
/// Phi the flow of `w`. The s-difference is outermost.
double stochastic_chi(const Model& model, const VariationFamily& family, const VectorField& w, const Vec& x,
                      const NestedSchedule& sched = {});

/// Same nested difference for an arbitrary bracket k(s, tau) with k(s, 0) = k(0, tau) = 0 allowed:
/// returns 1/2 d/ds+ d/dtau+ k(s, tau).
double nested_chi(const std::function<double(double, double)>& k, const NestedSchedule& sched = {});

/// 1/2 sum_{x in region} w_x (D^+_w - D^+_{-w}) ell(x).
double symmetric_derivative_region(const Model& model, const std::vector<int>& region, const VectorField& w,
                                   const HSchedule& sched = {});

struct SecondOrderReport {
    double lhs = 0.0;
    double chi1 = 0.0;
    double chi2 = 0.0;
    double residual = 0.0;  // lhs - (chi1 + chi2)
};

/// Second-order non-differentiable field equation at x for a flow family v and jet w.
SecondOrderReport second_order_residual(const Model& model, const VariationFamily& v, const Jet& w, const Vec& x,
                                        const NestedSchedule& sched = {0.05, 4, 0.1});

/// [u, v] = ([u,v]_vector, D_u b - D_v a), derivatives by central differences of step h.
Jet jet_commutator(const Jet& u, const Jet& v, const ConfigurationSpace& space, double h = 1e-5);

}  // namespace cfs
