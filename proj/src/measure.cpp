#include "cfs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace cfs {

double ConfigurationSpace::L(const Vec& x, const Vec& y, double kappa) const {
    double v = lagrangian(x, y);
    if (kappa != 0.0) {
        if (!bounded_term) fail(ErrorCode::InvalidArgument, name + ": kappa needs a bounded term");
        v += kappa * bounded_term(x, y);
    }
    return v;
}

Vec ConfigurationSpace::random_tangent(const Vec& x, std::mt19937_64& rng) const {
    std::normal_distribution<double> g;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vec u(x.size());
        for (int i = 0; i < u.size(); ++i) u[i] = g(rng);
        u = tangent(x, u);
        const double n = u.norm();
        if (n > 1e-8) return u / n;
    }
    fail(ErrorCode::InvalidArgument, name + ": degenerate tangent space");
}

double sphere_lagrangian(const Vec& x, const Vec& y, double tau) {
    if (std::abs(x.norm() - 1.0) > 1e-10 || std::abs(y.norm() - 1.0) > 1e-10)
        fail(ErrorCode::NotUnitVector, "sphere Lagrangian needs unit vectors");
    const double c = x.dot(y);
    const double t2 = tau * tau;
    const double D = 2.0 * t2 * (1.0 + c) * (2.0 - t2 * (1.0 - c));
    return std::max(0.0, D);
}

static Vec sphere_move(const Vec& x, const Vec& u, double h) {
    Vec ut = u - u.dot(x) * x;
    const double n = ut.norm();
    if (n == 0.0 || h == 0.0) return x;
    const double th = h * n;
    Vec y = std::cos(th) * x + std::sin(th) * (ut / n);
    return y / y.norm();
}

static ConfigurationSpace sphere_base(const std::string& name) {
    ConfigurationSpace s;
    s.name = name;
    s.move = sphere_move;
    s.tangent = [](const Vec& x, const Vec& u) -> Vec { return u - u.dot(x) * x; };
    s.distance = [](const Vec& x, const Vec& y) { return std::acos(std::clamp(x.dot(y), -1.0, 1.0)); };
    s.random_point = [](std::mt19937_64& rng) -> Vec {
        std::normal_distribution<double> g;
        Vec v(3);
        do {
            v << g(rng), g(rng), g(rng);
        } while (v.norm() < 1e-8);
        return v / v.norm();
    };
    s.tangent_dim = 2;
    return s;
}

ConfigurationSpace sphere_space(double tau) {
    ConfigurationSpace s = sphere_base("sphere");
    s.lagrangian = [tau](const Vec& x, const Vec& y) { return sphere_lagrangian(x, y, tau); };
    return s;
}

ConfigurationSpace quadratic_sphere_space() {
    ConfigurationSpace s = sphere_base("sphere-quadratic");
    s.lagrangian = [](const Vec& x, const Vec& y) {
        const double c = x.dot(y);
        return 1.0 + c * c;
    };
    return s;
}

Vec pack_hermitian(const CMat& m) {
    const int f = static_cast<int>(m.rows());
    Vec v(f * f);
    int k = 0;
    for (int i = 0; i < f; ++i) v[k++] = m(i, i).real();
    for (int i = 0; i < f; ++i)
        for (int j = i + 1; j < f; ++j) {
            v[k++] = m(i, j).real();
            v[k++] = m(i, j).imag();
        }
    return v;
}

CMat unpack_hermitian(const Vec& v) {
    const int f = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (f * f != v.size()) fail(ErrorCode::DimensionMismatch, "packed Hermitian length is not a square");
    CMat m(f, f);
    int k = 0;
    for (int i = 0; i < f; ++i) m(i, i) = v[k++];
    for (int i = 0; i < f; ++i)
        for (int j = i + 1; j < f; ++j) {
            m(i, j) = cplx(v[k], v[k + 1]);
            m(j, i) = cplx(v[k], -v[k + 1]);
            k += 2;
        }
    return m;
}

ConfigurationSpace operator_space(int f, int n, const NumericsConfig& cfg) {
    ConfigurationSpace s;
    s.name = "operator";
    auto spectrum = [n, cfg](const Vec& x, const Vec& y) {
        const CMat xy = unpack_hermitian(x) * unpack_hermitian(y);
        return spectrum_from_eigs(nontrivial_eigenvalues(xy, 2 * n, cfg));
    };
    s.lagrangian = [spectrum, n, cfg](const Vec& x, const Vec& y) {
        return lagrangian_from_spectrum(spectrum(x, y), n, 0.0, cfg.tol_class).L;
    };
    s.bounded_term = [spectrum, n](const Vec& x, const Vec& y) {
        return lagrangian_from_spectrum(spectrum(x, y), n).bounded_term;
    };
    s.move = [](const Vec& x, const Vec& u, double h) -> Vec { return x + h * u; };
    s.tangent = [](const Vec&, const Vec& u) -> Vec { return u; };
    s.distance = [](const Vec& x, const Vec& y) { return (unpack_hermitian(x) - unpack_hermitian(y)).norm(); };
    s.random_point = [f, n](std::mt19937_64& rng) -> Vec { return pack_hermitian(random_point(f, n, rng).matrix); };
    s.tangent_dim = f * f;
    return s;
}

double DiscreteMeasure::total_volume() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

DiscreteMeasure make_measure(std::vector<Vec> points, std::vector<double> weights,
                             const ConfigurationSpace& space, double merge_tol) {
    if (points.size() != weights.size()) fail(ErrorCode::DimensionMismatch, "points and weights differ in length");
    DiscreteMeasure m;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(weights[i] > 0.0)) fail(ErrorCode::InvalidArgument, "weights must be positive");
        bool merged = false;
        for (std::size_t j = 0; j < m.points.size(); ++j) {
            if (space.distance(points[i], m.points[j]) < merge_tol) {
                m.weights[j] += weights[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            m.points.push_back(points[i]);
            m.weights.push_back(weights[i]);
        }
    }
    return m;
}

DiscreteMeasure counting_measure(std::vector<Vec> points, double total) {
    DiscreteMeasure m;
    const double w = total / static_cast<double>(points.size());
    m.weights.assign(points.size(), w);
    m.points = std::move(points);
    return m;
}

double action(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            s += m.weights[i] * m.weights[j] * space.L(m.points[i], m.points[j], kappa);
    return s;
}

double integrated_lagrangian(const Vec& x, const DiscreteMeasure& m, const ConfigurationSpace& space,
                             double kappa) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) s += m.weights[j] * space.L(x, m.points[j], kappa);
    return s;
}

double ell(const Vec& x, const DiscreteMeasure& m, double nu, const ConfigurationSpace& space, double kappa) {
    return integrated_lagrangian(x, m, space, kappa) - 0.5 * nu;
}

ElReport el_residual_fixed_nu(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa,
                              const std::vector<Vec>& probes, double nu) {
    if (m.size() == 0) fail(ErrorCode::EmptyMeasure, "measure has no support");
    ElReport r;
    r.nu = nu;
    r.inf_probe = INFINITY;
    for (const Vec& x : m.points) {
        const double e = ell(x, m, nu, space, kappa);
        r.ell_on_support.push_back(e);
        r.max_abs_support = std::max(r.max_abs_support, std::abs(e));
        if (e < r.inf_probe) {
            r.inf_probe = e;
            r.argmin_probe = x;
        }
    }
    for (const Vec& x : probes) {
        const double e = ell(x, m, nu, space, kappa);
        if (e < r.inf_probe) {
            r.inf_probe = e;
            r.argmin_probe = x;
        }
    }
    return r;
}

ElReport el_residual(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa,
                     const std::vector<Vec>& probes) {
    if (m.size() == 0) fail(ErrorCode::EmptyMeasure, "measure has no support");
    double lo = INFINITY;
    for (const Vec& x : m.points) lo = std::min(lo, integrated_lagrangian(x, m, space, kappa));
    for (const Vec& x : probes) lo = std::min(lo, integrated_lagrangian(x, m, space, kappa));
    return el_residual_fixed_nu(m, space, kappa, probes, 2.0 * lo);
}

double constrained_min_eigenvalue(const Eigen::MatrixXd& L, const std::vector<double>& weights) {
    const int m = static_cast<int>(weights.size());
    if (m < 2) fail(ErrorCode::EmptyMeasure, "constrained eigenvalue needs at least two support points");
    Vec s(m);
    for (int i = 0; i < m; ++i) s[i] = std::sqrt(weights[i]);
    Eigen::MatrixXd K = s.asDiagonal() * L * s.asDiagonal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(s);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd B = Q.rightCols(m - 1);
    Eigen::MatrixXd R = B.transpose() * K * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (R + R.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

double lrho_min_constrained_eigenvalue(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa) {
    if (m.size() == 0) fail(ErrorCode::EmptyMeasure, "measure has no support");
    const int n = static_cast<int>(m.size());
    Eigen::MatrixXd L(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) L(i, j) = space.L(m.points[i], m.points[j], kappa);
    return constrained_min_eigenvalue(L, m.weights);
}

std::vector<Vec> fibonacci_sphere(int count) {
    std::vector<Vec> pts;
    pts.reserve(count);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        Vec p(3);
        p << r * std::cos(phi), r * std::sin(phi), z;
        pts.push_back(p);
    }
    return pts;
}

DiscreteMeasure fixture_measure(const std::string& name, std::uint64_t seed) {
    std::smatch mt;
    if (name == "octahedron") {
        std::vector<Vec> pts;
        for (int k = 0; k < 3; ++k)
            for (double sgn : {1.0, -1.0}) {
                Vec p = Vec::Zero(3);
                p[k] = sgn;
                pts.push_back(p);
            }
        return counting_measure(pts);
    }
    static const std::regex random_re(R"(sphere-random\((\d+)\))");
    if (std::regex_match(name, mt, random_re)) {
        const int N = std::stoi(mt[1]);
        if (N < 1) fail(ErrorCode::UnknownFixture, name);
        std::mt19937_64 rng(seed);
        ConfigurationSpace s = sphere_space(std::sqrt(2.0));
        std::vector<Vec> pts;
        for (int i = 0; i < N; ++i) pts.push_back(s.random_point(rng));
        return counting_measure(pts);
    }
    static const std::regex lattice_re(R"(lattice\((\d+)x(\d+)\))");
    if (std::regex_match(name, mt, lattice_re)) {
        const int A = std::stoi(mt[1]), B = std::stoi(mt[2]);
        if (A < 1 || B < 1) fail(ErrorCode::UnknownFixture, name);
        DiscreteMeasure m;
        for (int t = -(A / 2); t < A - A / 2; ++t)
            for (int s = -(B / 2); s < B - B / 2; ++s) {
                Vec p(3);
                p << t, s, 0.0;
                m.points.push_back(p);
                m.weights.push_back(1.0);
            }
        return m;
    }
    fail(ErrorCode::UnknownFixture, "unknown fixture '" + name + "'");
}

std::vector<double> pairwise_angles(const std::vector<Vec>& pts) {
    std::vector<double> a;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            a.push_back(std::acos(std::clamp(pts[i].normalized().dot(pts[j].normalized()), -1.0, 1.0)));
    std::sort(a.begin(), a.end());
    return a;
}

}  // namespace cfs
