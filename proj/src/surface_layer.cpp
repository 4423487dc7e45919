#include "cfs/surface_layer.hpp"

#include <algorithm>
#include <cmath>

namespace cfs {

RegionSplit RegionSplit::from_omega(std::vector<int> omega, std::size_t size) {
    std::vector<char> in(size, 0);
    for (int i : omega) {
        if (i < 0 || static_cast<std::size_t>(i) >= size) fail(ErrorCode::InvalidArgument, "region index out of range");
        if (in[i]) fail(ErrorCode::InvalidArgument, "region index repeated");
        in[i] = 1;
    }
    RegionSplit r;
    std::sort(omega.begin(), omega.end());
    r.omega = std::move(omega);
    for (std::size_t i = 0; i < size; ++i)
        if (!in[i]) r.complement.push_back(static_cast<int>(i));
    return r;
}

static void check_split(const DiscreteMeasure& m, const RegionSplit& split) {
    if (split.omega.size() + split.complement.size() != m.size())
        fail(ErrorCode::DimensionMismatch, "region split does not cover the support");
    for (int i : split.omega)
        if (i < 0 || static_cast<std::size_t>(i) >= m.size()) fail(ErrorCode::InvalidArgument, "region index out of range");
    for (int i : split.complement)
        if (i < 0 || static_cast<std::size_t>(i) >= m.size()) fail(ErrorCode::InvalidArgument, "region index out of range");
}

double surface_layer_integral(const DiscreteMeasure& m, const RegionSplit& split, const PairFunction& integrand) {
    check_split(m, split);
    long double sum = 0.0L;
    for (int i : split.omega)
        for (int j : split.complement)
            sum += static_cast<long double>(m.weights[i] * m.weights[j] * integrand(m.points[i], m.points[j]));
    return static_cast<double>(sum);
}

SymmetryMode parse_symmetry_mode(const std::string& name) {
    if (name == "lagrangian") return SymmetryMode::Lagrangian;
    if (name == "measure") return SymmetryMode::Measure;
    if (name == "gis") return SymmetryMode::Gis;
    if (name == "killing") return SymmetryMode::Killing;
    fail(ErrorCode::UnsupportedMode, "unknown symmetry mode '" + name + "'");
}

const char* to_string(SymmetryMode mode) {
    switch (mode) {
    case SymmetryMode::Lagrangian: return "lagrangian";
    case SymmetryMode::Measure: return "measure";
    case SymmetryMode::Gis: return "gis";
    case SymmetryMode::Killing: return "killing";
    }
    return "unknown";
}

static double measure_violation(const Model& model, const Flow& flow, double tau) {
    const auto& m = model.measure;
    std::vector<double> moved(m.size(), 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Vec y = flow(tau, m.points[i]);
        std::size_t best = 0;
        double dbest = INFINITY;
        for (std::size_t j = 0; j < m.size(); ++j) {
            const double d = model.space.distance(y, m.points[j]);
            if (d < dbest) {
                dbest = d;
                best = j;
            }
        }
        if (dbest > 1e-6) {
            // unmatched mass counts in full
            worst = std::max(worst, std::max(dbest, m.weights[i]));
            continue;
        }
        worst = std::max(worst, dbest);
        moved[best] += m.weights[i];
    }
    for (std::size_t j = 0; j < m.size(); ++j) worst = std::max(worst, std::abs(moved[j] - m.weights[j]));
    return worst;
}

static double gis_sum(const Model& model, const Flow& flow, const RegionSplit& split, double tau) {
    const auto& m = model.measure;
    long double sum = 0.0L;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Vec px = flow(tau, m.points[i]);
        for (int j : split.omega)
            sum += m.weights[i] * m.weights[j] * (model.L(px, m.points[j]) - model.L(m.points[i], m.points[j]));
    }
    return std::abs(static_cast<double>(sum));
}

double symmetry_check(const Model& model, const Flow& flow, SymmetryMode mode, const std::vector<double>& taus,
                      const RegionSplit* split) {
    const auto& m = model.measure;
    double worst = 0.0;
    for (double tau : taus) {
        switch (mode) {
        case SymmetryMode::Lagrangian:
            for (std::size_t i = 0; i < m.size(); ++i) {
                const Vec back = flow(-tau, m.points[i]);
                for (std::size_t j = 0; j < m.size(); ++j) {
                    const double a = model.L(m.points[i], flow(tau, m.points[j]));
                    const double b = model.L(back, m.points[j]);
                    worst = std::max(worst, std::abs(a - b));
                }
            }
            break;
        case SymmetryMode::Measure:
            worst = std::max(worst, measure_violation(model, flow, tau));
            break;
        case SymmetryMode::Gis:
            if (!split) fail(ErrorCode::InvalidArgument, "gis symmetry needs a region");
            check_split(m, *split);
            worst = std::max(worst, gis_sum(model, flow, *split, tau));
            break;
        case SymmetryMode::Killing:
            fail(ErrorCode::UnsupportedMode, "killing pairs are checked per component");
        }
    }
    return worst;
}

BookkeepingIdentity prpuseful_identity(const Model& model, const Flow& flow, const RegionSplit& split, double tau) {
    const auto& m = model.measure;
    check_split(m, split);
    const std::size_t n = m.size();
    std::vector<Vec> moved(n);
    for (std::size_t i = 0; i < n; ++i) moved[i] = flow(tau, m.points[i]);

    BookkeepingIdentity r;
    long double lhs = 0.0L, nid2 = 0.0L, nid3 = 0.0L, scale = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
        for (int j : split.omega) {
            const double a = model.L(moved[i], m.points[j]), b = model.L(m.points[i], m.points[j]);
            lhs += m.weights[i] * m.weights[j] * (a - b);
            scale += m.weights[i] * m.weights[j] * (std::abs(a) + std::abs(b));
        }
    for (int i : split.omega) {
        const double a = integrated_lagrangian(moved[i], m, model.space, model.kappa);
        const double b = integrated_lagrangian(m.points[i], m, model.space, model.kappa);
        nid2 += m.weights[i] * (a - b);
        for (int j : split.complement) {
            const double c = model.L(moved[i], m.points[j]), d = model.L(m.points[i], moved[j]);
            nid3 += m.weights[i] * m.weights[j] * (c - d);
        }
    }
    r.lhs = static_cast<double>(lhs);
    r.nid2 = static_cast<double>(nid2);
    r.nid3 = static_cast<double>(nid3);
    r.rhs = static_cast<double>(nid2 - nid3);
    r.scale = static_cast<double>(scale);
    return r;
}

ConservationReport noether_derivative(const Model& model, const Flow& flow, const RegionSplit& split,
                                      SymmetryMode mode, const NoetherOptions& opt) {
    const auto& m = model.measure;
    check_split(m, split);
    if (!(opt.h > 0.0) || opt.levels < 2) fail(ErrorCode::InvalidArgument, "noether step schedule out of range");

    double maxL = 0.0;
    for (const Vec& x : m.points)
        for (const Vec& y : m.points) maxL = std::max(maxL, std::abs(model.L(x, y)));

    ConservationReport rep;
    rep.mode = to_string(mode);
    rep.h_used = opt.h;
    const double sym_tol = 1e-9 * std::max(1.0, maxL);
    if (opt.check_symmetry) {
        const std::vector<double> taus{opt.h, -opt.h, 0.1, -0.1};
        switch (mode) {
        case SymmetryMode::Lagrangian:
            rep.symmetry_violation = symmetry_check(model, flow, mode, taus);
            break;
        case SymmetryMode::Measure:
            rep.symmetry_violation = symmetry_check(model, flow, mode, taus);
            break;
        case SymmetryMode::Gis:
            rep.symmetry_violation = symmetry_check(model, flow, mode, taus, &split);
            break;
        case SymmetryMode::Killing:
            if (!opt.killing_f) fail(ErrorCode::InvalidArgument, "killing mode needs the transformation f");
            rep.symmetry_violation = std::max(symmetry_check(model, opt.killing_f, SymmetryMode::Measure, taus),
                                              symmetry_check(model, flow, SymmetryMode::Lagrangian, taus));
            break;
        }
        const double limit = mode == SymmetryMode::Measure || mode == SymmetryMode::Killing ? 1e-6 : sym_tol;
        if (rep.symmetry_violation > limit)
            fail(ErrorCode::SymmetryViolation, std::string(to_string(mode)) + " symmetry violated by " +
                                                   std::to_string(rep.symmetry_violation));
    } else if (mode == SymmetryMode::Killing && !opt.killing_f) {
        fail(ErrorCode::InvalidArgument, "killing mode needs the transformation f");
    }

    auto S = [&](double tau) {
        PairFunction integrand;
        switch (mode) {
        case SymmetryMode::Lagrangian:
            integrand = [&](const Vec& x, const Vec& y) { return model.L(flow(tau, x), y) - model.L(flow(-tau, x), y); };
            break;
        case SymmetryMode::Measure:
        case SymmetryMode::Gis:
            integrand = [&](const Vec& x, const Vec& y) { return model.L(flow(tau, x), y) - model.L(x, flow(tau, y)); };
            break;
        case SymmetryMode::Killing:
            integrand = [&](const Vec& x, const Vec& y) {
                return model.L(opt.killing_f(tau, x), y) - model.L(x, opt.killing_f(tau, y)) -
                       model.L(flow(tau, x), y) + model.L(x, flow(tau, y));
            };
            break;
        }
        return surface_layer_integral(m, split, integrand);
    };
    auto q = [&](double h) { return (S(h) - S(-h)) / (2.0 * h); };
    const Extrapolation e = extrapolate(q, HSchedule{opt.h, opt.levels}, 1e-3, 1e-8);
    if (e.divergence != 0 || !e.converged)
        fail(ErrorCode::NonConvergent, "surface-layer derivative does not settle");
    rep.derivative_estimate = e.value;
    rep.error_estimate = e.error;

    const double pairs = static_cast<double>(split.omega.size() * split.complement.size());
    rep.tolerance = opt.tol >= 0.0 ? opt.tol : std::max(1e-12, pairs * maxL * opt.h * opt.h);
    rep.pass = std::abs(rep.derivative_estimate) <= rep.tolerance;

    const Flow& bookkeeping = mode == SymmetryMode::Killing ? opt.killing_f : flow;
    const BookkeepingIdentity id = prpuseful_identity(model, bookkeeping, split, opt.h);
    rep.nid1 = id.lhs;
    rep.nid2 = id.nid2;
    rep.nid3 = id.nid3;
    return rep;
}

namespace {

// Difference quotients at outer step s (inner step r s for the second slot).
struct PairStencil {
    const Model& model;
    double s;
    double r;

    Vec fl(const VectorField& w, const Vec& x, double t) const { return flow(model.space, w, x, t); }

    // D~ in the first argument
    double d1(const VectorField& u, const Vec& x, const Vec& y) const {
        return (model.L(fl(u, x, s), y) - model.L(fl(u, x, -s), y)) / (2.0 * s);
    }
    // D~ in the second argument
    double d2(const VectorField& v, const Vec& x, const Vec& y) const {
        return (model.L(x, fl(v, y, s)) - model.L(x, fl(v, y, -s))) / (2.0 * s);
    }
    // D~_{1,u} D~_{2,v}, inner (second-slot) step r s
    double d12(const VectorField& u, const VectorField& v, const Vec& x, const Vec& y) const {
        const double t = r * s;
        const Vec xp = fl(u, x, s), xm = fl(u, x, -s);
        const Vec yp = fl(v, y, t), ym = fl(v, y, -t);
        return (model.L(xp, yp) - model.L(xp, ym) - model.L(xm, yp) + model.L(xm, ym)) / (4.0 * s * t);
    }
    // nabla~_{1,u} nabla~_{2,v} L
    double nn(const Jet& u, const Jet& v, const Vec& x, const Vec& y) const {
        const double a = u.scalar(x), b = v.scalar(y);
        return a * b * model.L(x, y) + a * d2(v.vector, x, y) + b * d1(u.vector, x, y) +
               d12(u.vector, v.vector, x, y);
    }
};

HSchedule outer_schedule(const NestedSchedule& s) {
    if (!(s.s0 > 0.0) || !(s.ratio > 0.0) || s.levels < 2)
        fail(ErrorCode::InvalidArgument, "nested schedule out of range");
    return HSchedule{s.s0, s.levels};
}

double settle(const Extrapolation& e, const char* what) {
    if (e.divergence != 0) return e.value;
    if (!e.converged) fail(ErrorCode::NonConvergent, std::string(what) + ": difference quotients do not settle");
    return e.value;
}

}  // namespace

double sigma_omega(const Model& model, const RegionSplit& split, const Jet& u, const Jet& v,
                   const NestedSchedule& sched) {
    const auto& m = model.measure;
    check_split(m, split);
    auto q = [&](double s) {
        const PairStencil st{model, s, sched.ratio};
        return surface_layer_integral(m, split, [&](const Vec& x, const Vec& y) {
            return st.nn(u, v, x, y) - st.nn(v, u, x, y);
        });
    };
    return settle(extrapolate(q, outer_schedule(sched), 1e-3, 1e-7), "symplectic form");
}

BalanceReport nondiff_symplectic_balance(const Model& model, const VariationFamily& w, const VariationFamily& v,
                                         const RegionSplit& split, const NestedSchedule& sched) {
    const auto& m = model.measure;
    check_split(m, split);
    const Jet& wj = w.generator;
    const Jet& vj = v.generator;
    BalanceReport r;
    r.sigma = sigma_omega(model, split, wj, vj, sched);

    const VariationFamily w_rev = w.reversed(), v_rev = v.reversed();
    long double chi = 0.0L;
    for (int i : split.omega) {
        const Vec& x = m.points[i];
        const double c = stochastic_chi(model, v, wj.vector, x, sched) -
                         stochastic_chi(model, v_rev, wj.vector, x, sched) -
                         stochastic_chi(model, w, vj.vector, x, sched) +
                         stochastic_chi(model, w_rev, vj.vector, x, sched);
        chi += m.weights[i] * 0.5 * c;
    }
    r.chi_tilde_sum = static_cast<double>(chi);

    const Jet comm = jet_commutator(wj, vj, model.space);
    const HSchedule hs = outer_schedule(sched);
    long double commutator = 0.0L;
    for (int i : split.omega) {
        const Vec& x = m.points[i];
        auto q = [&](double h) {
            return (model.ell(flow(model.space, comm.vector, x, h)) - model.ell(flow(model.space, comm.vector, x, -h))) /
                   (2.0 * h);
        };
        const double d = settle(extrapolate(q, hs, 1e-3, 1e-7), "commutator derivative");
        commutator += m.weights[i] * (comm.scalar(x) * model.ell(x) + d);
    }
    r.commutator_term = static_cast<double>(commutator);
    r.residual = r.sigma - (r.chi_tilde_sum - r.commutator_term);

    // alternative form: sum_Omega [b nabla~_w ell - c nabla~_v ell]
    //   + sum_Omega sum_M [D~_{1,w} nabla~_{2,v} L - D~_{1,v} nabla~_{2,w} L]
    auto qalt = [&](double s) {
        const PairStencil st{model, s, sched.ratio};
        long double sum = 0.0L;
        for (int i : split.omega) {
            const Vec& x = m.points[i];
            const double lx = model.ell(x);
            const Vec xpw = st.fl(wj.vector, x, s), xmw = st.fl(wj.vector, x, -s);
            const Vec xpv = st.fl(vj.vector, x, s), xmv = st.fl(vj.vector, x, -s);
            const double nab_w = wj.scalar(x) * lx + (model.ell(xpw) - model.ell(xmw)) / (2.0 * s);
            const double nab_v = vj.scalar(x) * lx + (model.ell(xpv) - model.ell(xmv)) / (2.0 * s);
            sum += m.weights[i] * (vj.scalar(x) * nab_w - wj.scalar(x) * nab_v);
            for (std::size_t j = 0; j < m.size(); ++j) {
                const Vec& y = m.points[j];
                const double t1 = vj.scalar(y) * st.d1(wj.vector, x, y) + st.d12(wj.vector, vj.vector, x, y);
                const double t2 = wj.scalar(y) * st.d1(vj.vector, x, y) + st.d12(vj.vector, wj.vector, x, y);
                sum += m.weights[i] * m.weights[j] * (t1 - t2);
            }
        }
        return static_cast<double>(sum);
    };
    r.alt_form = settle(extrapolate(qalt, hs, 1e-3, 1e-7), "alternative symplectic form");
    r.scale = std::max({1.0, std::abs(r.sigma), std::abs(r.chi_tilde_sum), std::abs(r.commutator_term)});
    return r;
}

DiscreteMeasure unitary_orbit_measure(const CfsPoint& x0, const CMat& G, int N) {
    if (N < 1) fail(ErrorCode::InvalidArgument, "orbit needs at least one point");
    if (G.rows() != x0.dim() || G.cols() != x0.dim()) fail(ErrorCode::DimensionMismatch, "generator dimension");
    std::vector<Vec> pts;
    for (int k = 0; k < N; ++k) {
        const CMat V = unitary_exp(G, 2.0 * kPi * k / N);
        pts.push_back(pack_hermitian(V * x0.matrix * V.adjoint()));
    }
    return counting_measure(std::move(pts));
}

Flow conjugation_flow(const CMat& A) {
    if ((A - A.adjoint()).norm() > 1e-12 * std::max(1.0, A.norm()))
        fail(ErrorCode::NotHermitian, "generator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(A);
    const CMat U = es.eigenvectors();
    const Vec ev = es.eigenvalues();
    return [U, ev](double tau, const Vec& x) -> Vec {
        CVec phase(ev.size());
        for (int i = 0; i < ev.size(); ++i) phase[i] = std::exp(cplx(0.0, tau * ev[i]));
        const CMat V = U * phase.asDiagonal() * U.adjoint();
        return pack_hermitian(V * unpack_hermitian(x) * V.adjoint());
    };
}

Flow rotation_flow(const Vec& axis) {
    const VariationFamily fam = rotation_family(axis);
    return fam.F;
}

Flow pinned_rotation_flow(const Vec& axis) {
    if (axis.size() != 3 || !(axis.norm() > 0.0)) fail(ErrorCode::InvalidArgument, "axis must be a nonzero 3-vector");
    const Vec a = axis.normalized();
    return [a](double tau, const Vec& x) -> Vec {
        const double c = a.dot(x);
        return rotation_matrix(a, tau * c * c * (1.0 - c * c)) * Eigen::Vector3d(x);
    };
}

Flow identity_flow() {
    return [](double, const Vec& x) { return x; };
}

}  // namespace cfs
