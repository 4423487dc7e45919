#include "cfs/jets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfs {

Extrapolation extrapolate(const std::function<double(double)>& quotient, const HSchedule& sched, double tol_rel,
                          double tol_abs) {
    if (!(sched.h0 > 0.0) || sched.levels < 2) fail(ErrorCode::InvalidArgument, "step schedule out of range");
    const int n = sched.levels;
    std::vector<double> raw(n);
    std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
    double h = sched.h0;
    for (int i = 0; i < n; ++i, h *= 0.5) {
        raw[i] = quotient(h);
        T[i][0] = raw[i];
        double p = 2.0;
        for (int j = 1; j <= i; ++j, p *= 2.0) T[i][j] = T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (p - 1.0);
    }

    Extrapolation out;
    // a quotient that doubles with every halving is a jump divided by h
    if (n >= 3) {
        bool doubling = true;
        for (int i = n - 3; i < n - 1; ++i) {
            const double r = raw[i + 1] / raw[i];
            doubling = doubling && std::isfinite(r) && r > 1.8 && r < 2.2;
        }
        if (doubling && std::abs(raw[n - 1]) > 1.0 / sched.h0) {
            out.divergence = raw[n - 1] > 0.0 ? 1 : -1;
            out.value = out.divergence * std::numeric_limits<double>::infinity();
            out.error = std::numeric_limits<double>::infinity();
            return out;
        }
    }

    out.value = T[0][0];
    out.error = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j <= i; ++j) {
            const double e = std::max(std::abs(T[i][j] - T[i][j - 1]), std::abs(T[i][j] - T[i - 1][j - 1]));
            if (e < out.error) {
                out.error = e;
                out.value = T[i][j];
            }
        }
    }
    out.converged = std::isfinite(out.value) && out.error <= tol_rel * std::abs(out.value) + tol_abs;
    return out;
}

static double finish(const Extrapolation& e, const char* what) {
    if (e.divergence != 0) return e.value;
    if (!e.converged)
        fail(ErrorCode::NonConvergent, std::string(what) + ": difference quotients do not settle (error estimate " +
                                           std::to_string(e.error) + ")");
    return e.value;
}

double semi_derivative(const ScalarField& fn, const Vec& x, const Vec& dir, Side side,
                       const ConfigurationSpace& space, const HSchedule& sched) {
    if (dir.norm() == 0.0) return 0.0;
    const double f0 = fn(x);
    const double sgn = side == Side::Plus ? 1.0 : -1.0;
    const Vec d = sgn * dir;
    auto q = [&](double h) { return sgn * (fn(space.move(x, d, h)) - f0) / h; };
    return finish(extrapolate(q, sched), "semi-derivative");
}

double symmetric_semi_derivative(const ScalarField& fn, const Vec& x, const Vec& dir,
                                 const ConfigurationSpace& space, const HSchedule& sched) {
    if (dir.norm() == 0.0) return 0.0;
    auto q = [&](double h) { return (fn(space.move(x, dir, h)) - fn(space.move(x, -dir, h))) / (2.0 * h); };
    return finish(extrapolate(q, sched), "symmetric derivative");
}

Vec flow(const ConfigurationSpace& space, const VectorField& field, const Vec& x, double s, int steps) {
    if (steps < 1) fail(ErrorCode::InvalidArgument, "flow needs at least one step");
    Vec z = x;
    const double dt = s / steps;
    for (int k = 0; k < steps; ++k) {
        // midpoint rule on the retraction
        const Vec mid = space.move(z, field(z), 0.5 * dt);
        z = space.move(z, space.tangent(z, field(mid)), dt);
    }
    return z;
}

Jet Jet::negated() const {
    Jet j;
    auto a = scalar;
    auto u = vector;
    j.scalar = [a](const Vec& x) { return -a(x); };
    j.vector = [u](const Vec& x) -> Vec { return -u(x); };
    return j;
}

Jet Jet::scalar_only(ScalarField a, int ambient_dim) {
    Jet j;
    j.scalar = std::move(a);
    j.vector = [ambient_dim](const Vec&) -> Vec { return Vec::Zero(ambient_dim); };
    return j;
}

Jet Jet::vector_only(VectorField u) {
    Jet j;
    j.scalar = [](const Vec&) { return 0.0; };
    j.vector = std::move(u);
    return j;
}

VariationFamily VariationFamily::reversed() const {
    VariationFamily r;
    auto f0 = f;
    auto F0 = F;
    r.f = [f0](double tau, const Vec& x) { return f0(-tau, x); };
    r.F = [F0](double tau, const Vec& x) { return F0(-tau, x); };
    r.is_flow = is_flow;
    r.generator = generator.negated();
    return r;
}

Eigen::Matrix3d rotation_matrix(const Vec& axis, double angle) {
    if (axis.size() != 3 || axis.norm() == 0.0) fail(ErrorCode::InvalidArgument, "rotation axis must be a nonzero 3-vector");
    const Eigen::Vector3d a = axis.normalized();
    return Eigen::AngleAxisd(angle, a).toRotationMatrix();
}

VariationFamily rotation_family(const Vec& axis) {
    if (axis.size() != 3 || axis.norm() == 0.0) fail(ErrorCode::InvalidArgument, "rotation axis must be a nonzero 3-vector");
    const Eigen::Vector3d a = axis;
    VariationFamily fam;
    fam.f = [](double, const Vec&) { return 1.0; };
    fam.F = [a](double tau, const Vec& x) -> Vec {
        return rotation_matrix(a, tau * a.norm()) * Eigen::Vector3d(x);
    };
    fam.is_flow = true;
    fam.generator = Jet::vector_only([a](const Vec& x) -> Vec { return a.cross(Eigen::Vector3d(x)); });
    return fam;
}

VariationFamily weighted_rotation_family(const Vec& axis, ScalarField c) {
    VariationFamily fam = rotation_family(axis);
    fam.f = [c](double tau, const Vec& x) { return std::exp(tau * c(x)); };
    fam.is_flow = false;
    fam.generator.scalar = c;
    return fam;
}

SemiDerivReport nabla_jet(const ScalarField& ellfn, const Jet& jet, const Vec& x, const ConfigurationSpace& space,
                          const HSchedule& sched, double tol_diff, double tol_abs) {
    const double al = jet.scalar(x) * ellfn(x);
    const Vec u = jet.vector(x);
    SemiDerivReport r;
    r.plus = al + semi_derivative(ellfn, x, u, Side::Plus, space, sched);
    r.minus = al + semi_derivative(ellfn, x, u, Side::Minus, space, sched);
    r.symmetric = 0.5 * (r.plus + r.minus);
    r.differentiable = std::isfinite(r.plus) && std::isfinite(r.minus) &&
                       std::abs(r.plus - r.minus) <= tol_diff * std::max(1.0, std::abs(r.plus)) + tol_abs;
    r.h_used = sched.h0;
    return r;
}

double ell_tau(const Model& model, const VariationFamily& family, double tau, const Vec& z) {
    double sum = 0.0;
    const auto& m = model.measure;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const Vec& xj = m.points[j];
        sum += m.weights[j] * family.f(tau, xj) * model.L(z, family.F(tau, xj));
    }
    return sum - 0.5 * model.nu;
}

// f_tau(z) ell_tau(F_tau z)
static double weighted_ell(const Model& model, const VariationFamily& v, double tau, const Vec& z) {
    return v.f(tau, z) * ell_tau(model, v, tau, v.F(tau, z));
}

static HSchedule outer(const NestedSchedule& s) {
    if (!(s.s0 > 0.0) || !(s.ratio > 0.0) || s.levels < 2)
        fail(ErrorCode::InvalidArgument, "nested schedule out of range");
    return HSchedule{s.s0, s.levels};
}

double linearized_residual(const Model& model, const VariationFamily& v, const Jet& u, const Vec& x,
                           const NestedSchedule& sched) {
    const double a = u.scalar(x);
    const VectorField& uf = u.vector;
    const double r = sched.ratio;
    auto q = [&](double s) {
        const double t = r * s;
        const Vec xp = flow(model.space, uf, x, s);
        const Vec xm = flow(model.space, uf, x, -s);
        const double mixed = (weighted_ell(model, v, t, xp) - weighted_ell(model, v, -t, xp) -
                              weighted_ell(model, v, t, xm) + weighted_ell(model, v, -t, xm)) /
                             (4.0 * t * s);
        const double g = (weighted_ell(model, v, t, x) - weighted_ell(model, v, -t, x)) / (2.0 * t);
        return mixed + a * g;
    };
    return finish(extrapolate(q, outer(sched), 1e-3, 1e-9), "linearized field equation");
}

double nested_chi(const std::function<double(double, double)>& k, const NestedSchedule& sched) {
    const double r = sched.ratio;
    auto q = [&](double s) { return 0.5 * (k(s, r * s) - k(s, 0.0)) / (r * s * s); };
    return finish(extrapolate(q, outer(sched), 1e-3, 1e-7), "stochastic term");
}

// f_tau(x) [ell_tau(F_tau Phi_s x) - ell_tau(F_tau Phi_-s x)]
static std::function<double(double, double)> chi_bracket(const Model& model, const VariationFamily& family,
                                                          const VectorField& w, const Vec& x) {
    return [&model, &family, w, x](double s, double tau) {
        const Vec xp = flow(model.space, w, x, s);
        const Vec xm = flow(model.space, w, x, -s);
        return family.f(tau, x) *
               (ell_tau(model, family, tau, family.F(tau, xp)) - ell_tau(model, family, tau, family.F(tau, xm)));
    };
}

double stochastic_chi(const Model& model, const VariationFamily& family, const VectorField& w, const Vec& x,
                      const NestedSchedule& sched) {
    return nested_chi(chi_bracket(model, family, w, x), sched);
}

double symmetric_derivative_region(const Model& model, const std::vector<int>& region, const VectorField& w,
                                   const HSchedule& sched) {
    double sum = 0.0;
    const auto& m = model.measure;
    for (int i : region) {
        if (i < 0 || i >= static_cast<int>(m.size())) fail(ErrorCode::InvalidArgument, "region index out of range");
        const Vec& x = m.points[i];
        auto q = [&](double h) {
            return (model.ell(flow(model.space, w, x, h)) - model.ell(flow(model.space, w, x, -h))) / (2.0 * h);
        };
        sum += m.weights[i] * finish(extrapolate(q, sched), "symmetric derivative of ell");
    }
    return sum;
}

SecondOrderReport second_order_residual(const Model& model, const VariationFamily& v, const Jet& w, const Vec& x,
                                        const NestedSchedule& sched) {
    const double r = sched.ratio;
    const double c = w.scalar(x);
    // forward first plus second tau-difference of f_tau(z) ell_tau(F_tau z)
    auto H = [&](double t, const Vec& z) {
        const double g0 = weighted_ell(model, v, 0.0, z);
        const double g1 = weighted_ell(model, v, t, z);
        const double g2 = weighted_ell(model, v, 2.0 * t, z);
        return (g1 - g0) / t + (g2 - 2.0 * g1 + g0) / (t * t);
    };
    auto qlhs = [&](double s) {
        const double t = r * s;
        const Vec xp = flow(model.space, w.vector, x, s);
        const Vec xm = flow(model.space, w.vector, x, -s);
        return c * H(t, x) + (H(t, xp) - H(t, xm)) / (2.0 * s);
    };
    SecondOrderReport rep;
    rep.lhs = finish(extrapolate(qlhs, outer(sched), 1e-3, 1e-6), "second-order field equation");
    rep.chi1 = stochastic_chi(model, v, w.vector, x);
    const auto k = chi_bracket(model, v, w.vector, x);
    auto q2 = [&](double s) {
        const double t = r * s;
        return 0.5 * (k(s, 2.0 * t) - 2.0 * k(s, t) + k(s, 0.0)) / (t * t * s);
    };
    rep.chi2 = finish(extrapolate(q2, outer(sched), 1e-3, 1e-6), "second-order stochastic term");
    rep.residual = rep.lhs - (rep.chi1 + rep.chi2);
    return rep;
}

Jet jet_commutator(const Jet& u, const Jet& v, const ConfigurationSpace& space, double h) {
    if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "commutator step must be positive");
    Jet out;
    out.vector = [u, v, space, h](const Vec& x) -> Vec {
        const Vec ux = u.vector(x), vx = v.vector(x);
        const Vec Duv = (v.vector(space.move(x, ux, h)) - v.vector(space.move(x, ux, -h))) / (2.0 * h);
        const Vec Dvu = (u.vector(space.move(x, vx, h)) - u.vector(space.move(x, vx, -h))) / (2.0 * h);
        return space.tangent(x, Duv - Dvu);
    };
    out.scalar = [u, v, space, h](const Vec& x) {
        const Vec ux = u.vector(x), vx = v.vector(x);
        const double Dub = (v.scalar(space.move(x, ux, h)) - v.scalar(space.move(x, ux, -h))) / (2.0 * h);
        const double Dva = (u.scalar(space.move(x, vx, h)) - u.scalar(space.move(x, vx, -h))) / (2.0 * h);
        return Dub - Dva;
    };
    return out;
}

}  // namespace cfs
