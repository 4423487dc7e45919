#include "cfs/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cfs {

void LatticeParams::validate() const {
    if (!(eps > 0.0 && eps < 0.25)) fail(ErrorCode::InvalidParams, "eps must lie in (0, 1/4)");
    if (!(lambda_I >= 2.0)) fail(ErrorCode::InvalidParams, "lambda_I must be at least 2");
    if (!(lambda_A >= 2.0 * lambda_I + eps)) fail(ErrorCode::InvalidParams, "lambda_A must be at least 2 lambda_I + eps");
    if (!(delta > 0.0)) fail(ErrorCode::InvalidParams, "delta must be positive");
}

double wrap_angle(double phi) {
    double w = std::fmod(phi + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

Vec lattice_point(double t, double s, double phi) {
    Vec x(3);
    x << t, s, wrap_angle(phi);
    return x;
}

double lattice_lagrangian(const Vec& x, const Vec& y, const LatticeParams& p) {
    if (x.size() != 3 || y.size() != 3) fail(ErrorCode::DimensionMismatch, "lattice points have three coordinates");
    if (!x.allFinite() || !y.allFinite()) fail(ErrorCode::InvalidArgument, "lattice point is not finite");
    const double dt = x[0] - y[0], ds = x[1] - y[1];
    const double V = 1.0 - std::cos(x[2] - y[2]);
    const double e2 = p.eps * p.eps;
    auto in_ball = [&](double ct, double cs) { return (dt - ct) * (dt - ct) + (ds - cs) * (ds - cs) < e2; };

    double L = 0.0;
    if (std::abs(dt) < 1.0 && std::abs(ds) < 1.0) L += p.lambda_A;
    if (dt * dt - ds * ds > 0.0 && std::abs(dt) < 1.0 + p.eps) L += p.lambda_I;
    const double f = (in_ball(0, 1) ? 1.0 : 0.0) + (in_ball(0, -1) ? 1.0 : 0.0) - (in_ball(1, 0) ? 1.0 : 0.0) -
                     (in_ball(-1, 0) ? 1.0 : 0.0);
    L += V * f;
    if (in_ball(0, 0)) L += p.delta * V * V;
    return L;
}

ConfigurationSpace lattice_space(const LatticeParams& p) {
    p.validate();
    ConfigurationSpace s;
    s.name = "lattice";
    s.lagrangian = [p](const Vec& x, const Vec& y) { return lattice_lagrangian(x, y, p); };
    s.move = [](const Vec& x, const Vec& u, double h) -> Vec {
        Vec y = x + h * u;
        y[2] = wrap_angle(y[2]);
        return y;
    };
    s.tangent = [](const Vec&, const Vec& u) -> Vec { return u; };
    s.distance = [](const Vec& x, const Vec& y) {
        const double dp = wrap_angle(x[2] - y[2]);
        return std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) + dp * dp);
    };
    s.random_point = [](std::mt19937_64& rng) -> Vec {
        std::uniform_real_distribution<double> box(-3.0, 3.0), ang(-kPi, kPi);
        const double t = box(rng), sp = box(rng);
        return lattice_point(t, sp, ang(rng));
    };
    s.tangent_dim = 3;
    return s;
}

DiscreteMeasure lattice_window(int T, int S) {
    if (T < 1 || S < 1) fail(ErrorCode::BoxTooSmall, "lattice window must be nonempty");
    DiscreteMeasure m;
    for (int t = -(T / 2); t < T - T / 2; ++t)
        for (int s = -(S / 2); s < S - S / 2; ++s) {
            m.points.push_back(lattice_point(t, s));
            m.weights.push_back(1.0);
        }
    return m;
}

Model lattice_model(const LatticeParams& p, int T, int S) {
    return Model{lattice_space(p), lattice_window(T, S), p.nu(), 0.0};
}

std::vector<Vec> lattice_probes() {
    const double off[] = {-0.99, -0.5, -0.1, 0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99};
    const double phis[] = {0.0, 0.3, -1.0, 2.0, -kPi};
    std::vector<Vec> probes;
    for (double dt : off)
        for (double ds : off)
            for (double ph : phis) {
                if (dt == 0.0 && ds == 0.0 && ph == 0.0) continue;
                probes.push_back(lattice_point(dt, ds, ph));
            }
    return probes;
}

LatticeElReport lattice_el_check(const LatticeParams& p, int T, int S, const std::vector<Vec>& probes) {
    p.validate();
    if (T < 3 || S < 3) fail(ErrorCode::BoxTooSmall, "window needs an interior (at least 3 x 3)");
    const Model model = lattice_model(p, T, S);
    const int t_lo = -(T / 2), t_hi = T - T / 2 - 1;
    const int s_lo = -(S / 2), s_hi = S - S / 2 - 1;

    LatticeElReport rep;
    rep.el.nu = model.nu;
    for (const Vec& x : model.measure.points) {
        const int t = static_cast<int>(x[0]), s = static_cast<int>(x[1]);
        if (t <= t_lo || t >= t_hi || s <= s_lo || s >= s_hi) continue;
        const double l = model.ell(x);
        rep.el.ell_on_support.push_back(l);
        rep.el.max_abs_support = std::max(rep.el.max_abs_support, std::abs(l));
        ++rep.interior_sites;
    }

    rep.el.inf_probe = INFINITY;
    rep.min_off_lattice = INFINITY;
    rep.min_phi_offset = INFINITY;
    for (const Vec& x : probes) {
        // the interaction range is below 1 + eps < 2, so probes need two sites of margin
        if (x[0] - 2.0 <= t_lo || x[0] + 2.0 >= t_hi || x[1] - 2.0 <= s_lo || x[1] + 2.0 >= s_hi)
            fail(ErrorCode::BoxTooSmall, "probe too close to the window edge");
        const double l = model.ell(x);
        if (l < rep.el.inf_probe) {
            rep.el.inf_probe = l;
            rep.el.argmin_probe = x;
        }
        const bool on_site = x[0] == std::round(x[0]) && x[1] == std::round(x[1]);
        if (on_site)
            rep.min_phi_offset = std::min(rep.min_phi_offset, l);
        else
            rep.min_off_lattice = std::min(rep.min_off_lattice, l);
    }
    return rep;
}

namespace {

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

double lrho_stencil_min(double lambda_A, double lambda_I, int T, int S, Boundary b) {
    if (T < 1 || S < 1) fail(ErrorCode::BoxTooSmall, "window must be nonempty");
    if (b == Boundary::Periodic && T < 3) fail(ErrorCode::BoxTooSmall, "periodic time extent must be at least 3");
    const int n = T * S;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < S; ++s) {
            const int i = t * S + s;
            K(i, i) += lambda_A;
            for (int dt : {-1, 1}) {
                int t2 = t + dt;
                if (b == Boundary::Periodic)
                    t2 = wrap_index(t2, T);
                else if (t2 < 0 || t2 >= T)
                    continue;
                K(i, t2 * S + s) += lambda_I;
            }
        }
    if (n == 1) return K(0, 0);
    return constrained_min_eigenvalue(K, std::vector<double>(n, 1.0));
}

double lattice_lrho_bound(const LatticeParams& p, int T, int S, Boundary b) {
    p.validate();
    if (T < 1 || S < 1) fail(ErrorCode::BoxTooSmall, "window must be nonempty");
    if (b == Boundary::Periodic && (T < 3 || S < 3)) fail(ErrorCode::BoxTooSmall, "periodic window must be at least 3 x 3");
    const int n = T * S;
    Eigen::MatrixXd K(n, n);
    auto image = [b](int d, int period) {
        if (b == Boundary::Open) return static_cast<double>(d);
        d = wrap_index(d, period);
        return static_cast<double>(d > period / 2 ? d - period : d);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double dt = image(i / S - j / S, T), ds = image(i % S - j % S, S);
            K(i, j) = lattice_lagrangian(lattice_point(dt, ds), lattice_point(0, 0), p);
        }
    if (n == 1) return K(0, 0);
    return constrained_min_eigenvalue(K, std::vector<double>(n, 1.0));
}

LatticeField LatticeField::zeros(int s_min, int width, bool periodic) {
    if (width < 1) fail(ErrorCode::InvalidArgument, "field window must be nonempty");
    LatticeField f;
    f.s_min = s_min;
    f.periodic = periodic;
    f.b0.assign(width, 0.0);
    f.b1 = f.v0 = f.v1 = f.b0;
    return f;
}

int LatticeField::index(int s) const {
    const int i = s - s_min;
    if (periodic) return wrap_index(i, width());
    return (i >= 0 && i < width()) ? i : -1;
}

static void check_shape(const LatticeField& f) {
    const std::size_t n = f.b0.size();
    if (n == 0 || f.b1.size() != n || f.v0.size() != n || f.v1.size() != n)
        fail(ErrorCode::DimensionMismatch, "lattice field slices differ in width");
}

LatticeField evolve_linearized(LatticeField st, const LatticeParams& p, int steps) {
    p.validate();
    check_shape(st);
    if (steps < 0) fail(ErrorCode::InvalidArgument, "steps must be non-negative");
    const int w = st.width();
    const double ratio = p.lambda_A / p.lambda_I;
    std::vector<double> nb(w), nv(w);
    for (int k = 0; k < steps; ++k) {
        if (!st.periodic && (st.v1.front() != 0.0 || st.v1.back() != 0.0 || st.v0.front() != 0.0 ||
                             st.v0.back() != 0.0))
            fail(ErrorCode::WindowExhausted, "wave data reached the edge of the open window at t = " +
                                                 std::to_string(st.t + 1));
        for (int i = 0; i < w; ++i) {
            nb[i] = -ratio * st.b1[i] - st.b0[i];
            double left, right;
            if (st.periodic) {
                left = st.v1[wrap_index(i - 1, w)];
                right = st.v1[wrap_index(i + 1, w)];
            } else {
                left = i > 0 ? st.v1[i - 1] : 0.0;
                right = i + 1 < w ? st.v1[i + 1] : 0.0;
            }
            nv[i] = left + right - st.v0[i];
        }
        st.b0.swap(st.b1);
        st.b1.swap(nb);
        st.v0.swap(st.v1);
        st.v1.swap(nv);
        nb.resize(w);
        nv.resize(w);
        ++st.t;
    }
    return st;
}

SigmaParts lattice_sigma_t(const LatticeField& u, const LatticeField& v, const LatticeParams& p) {
    check_shape(u);
    check_shape(v);
    if (u.t != v.t || u.s_min != v.s_min || u.width() != v.width() || u.periodic != v.periodic)
        fail(ErrorCode::DimensionMismatch, "jets live on different windows or times");
    if (!u.periodic) {
        for (const auto* f : {&u, &v})
            for (const auto* sl : {&f->b0, &f->b1, &f->v0, &f->v1})
                if (sl->front() != 0.0 || sl->back() != 0.0)
                    fail(ErrorCode::SupportNotCompact, "jet does not vanish at the window edge");
    }
    SigmaParts r;
    for (int i = 0; i < u.width(); ++i) {
        const double s1 = u.b0[i] * v.b1[i], s2 = u.b1[i] * v.b0[i];
        r.scalar += p.lambda_I * (s1 - s2);
        r.scalar_scale += p.lambda_I * (std::abs(s1) + std::abs(s2));
        const double f1 = u.v1[i] * v.v0[i], f2 = u.v0[i] * v.v1[i];
        r.phi += f1 - f2;
        r.phi_scale += std::abs(f1) + std::abs(f2);
    }
    return r;
}

static double rel_drift(double value, double ref, double scale) {
    const double denom = std::max(std::abs(ref), scale);
    return denom == 0.0 ? 0.0 : std::abs(value - ref) / denom;
}

LatticeConservation conservation_report(LatticeField u, LatticeField v, const LatticeParams& p, int steps,
                                        double tol, InjectedDefect defect) {
    if (steps < 0) fail(ErrorCode::InvalidArgument, "steps must be non-negative");
    LatticeConservation rep;
    rep.tol = tol;
    SigmaParts s0 = lattice_sigma_t(u, v, p);
    for (int k = 0; k <= steps; ++k) {
        if (k > 0) {
            u = evolve_linearized(std::move(u), p, 1);
            v = evolve_linearized(std::move(v), p, 1);
            if (k == defect.step) {
                const int i = v.index(0);
                if (i >= 0) v.v1[i] += defect.value;
            }
        }
        const SigmaParts s = k == 0 ? s0 : lattice_sigma_t(u, v, p);
        rep.t.push_back(u.t);
        rep.sigma.push_back(s.total());
        rep.sigma_scalar.push_back(s.scalar);
        rep.sigma_phi.push_back(s.phi);
        rep.drift_scalar.push_back(rel_drift(s.scalar, s0.scalar, s.scalar_scale));
        rep.drift_phi.push_back(rel_drift(s.phi, s0.phi, s.phi_scale));
        rep.max_drift = std::max({rep.max_drift, rep.drift_scalar.back(), rep.drift_phi.back()});
    }
    rep.pass = rep.max_drift <= tol;
    return rep;
}

LatticeField random_compact_field(int width, int steps, std::uint64_t seed, bool scalar, bool phi) {
    if (width < 1 || steps < 0) fail(ErrorCode::InvalidArgument, "width must be positive and steps non-negative");
    const int pad = steps + 2;
    LatticeField f = LatticeField::zeros(-(width / 2) - pad, width + 2 * pad);
    f.t = -1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int s = -(width / 2); s < width - width / 2; ++s) {
        const int i = f.index(s);
        if (scalar) {
            f.b0[i] = U(rng);
            f.b1[i] = U(rng);
        }
        if (phi) {
            f.v0[i] = U(rng);
            f.v1[i] = U(rng);
        }
    }
    return f;
}

double lattice_weak_el(const LatticeParams& p, int t, int s, double a, double u, const SiteFunction& b,
                       const SiteFunction& vphi) {
    const double scalar = a * (p.lambda_A * b(t, s) + p.lambda_I * (b(t + 1, s) + b(t - 1, s)));
    const double wave = vphi(t, s + 1) + vphi(t, s - 1) - vphi(t + 1, s) - vphi(t - 1, s);
    return scalar - u * wave;
}

static std::array<int, 2> nearest_site(const Vec& x) {
    return {static_cast<int>(std::lround(x[0])), static_cast<int>(std::lround(x[1]))};
}

VariationFamily lattice_family(const SiteFunction& b, const SiteFunction& vphi) {
    VariationFamily fam;
    fam.f = [b](double tau, const Vec& x) {
        const auto st = nearest_site(x);
        return 1.0 + tau * b(st[0], st[1]);
    };
    fam.F = [vphi](double tau, const Vec& x) -> Vec {
        const auto st = nearest_site(x);
        Vec y = x;
        y[2] = wrap_angle(x[2] + tau * vphi(st[0], st[1]));
        return y;
    };
    fam.generator = lattice_jet(b, vphi);
    return fam;
}

Jet lattice_jet(const SiteFunction& a, const SiteFunction& uphi) {
    Jet j;
    j.scalar = [a](const Vec& x) {
        const auto st = nearest_site(x);
        return a(st[0], st[1]);
    };
    j.vector = [uphi](const Vec& x) -> Vec {
        const auto st = nearest_site(x);
        Vec u = Vec::Zero(3);
        u[2] = uphi(st[0], st[1]);
        return u;
    };
    return j;
}

Jet lattice_translation_jet(double vt, double vs) {
    return Jet::vector_only([vt, vs](const Vec&) -> Vec {
        Vec u(3);
        u << vt, vs, 0.0;
        return u;
    });
}

}  // namespace cfs
