#include "cfs/jets.hpp"
#include "cfs/lattice.hpp"

#include <doctest.h>

#include <cmath>

using namespace cfs;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}

ConfigurationSpace line_space() {
    ConfigurationSpace s;
    s.name = "line";
    s.move = [](const Vec& x, const Vec& u, double h) -> Vec { return x + h * u; };
    s.tangent = [](const Vec&, const Vec& u) { return u; };
    s.distance = [](const Vec& x, const Vec& y) { return (x - y).norm(); };
    s.tangent_dim = 1;
    return s;
}

Model octahedron() {
    return Model{sphere_space(std::sqrt(2.0)), fixture_measure("octahedron"), 16.0 / 3.0, 0.0};
}

Model smooth_octahedron() {
    Model q{quadratic_sphere_space(), fixture_measure("octahedron"), 0.0, 0.0};
    q.nu = 2.0 * integrated_lagrangian(v3(1, 0, 0), q.measure, q.space);
    return q;
}

const Vec e1 = v3(1, 0, 0), e2 = v3(0, 1, 0), e3 = v3(0, 0, 1);

}  // namespace

TEST_SUITE("jets") {

TEST_CASE("richardson extrapolation of a central quotient") {
    auto q = [](double h) { return (std::sin(1.0 + h) - std::sin(1.0 - h)) / (2.0 * h); };
    const Extrapolation e = extrapolate(q, HSchedule{});
    CHECK(e.converged);
    CHECK(std::abs(e.value - std::cos(1.0)) < 1e-7);
    CHECK_THROWS_AS(extrapolate(q, HSchedule{-1.0, 3}), Error);
}

TEST_CASE("cusp toy model semi-derivatives") {
    const ConfigurationSpace line = line_space();
    const double alpha = 1.5, beta = 0.4;
    const ScalarField l = [&](const Vec& x) { return x[0] >= 0.0 ? alpha * x[0] : -beta * x[0]; };
    CHECK(semi_derivative(l, v1(0), v1(1), Side::Plus, line) == doctest::Approx(alpha));
    CHECK(semi_derivative(l, v1(0), v1(1), Side::Minus, line) == doctest::Approx(-beta));
    CHECK(symmetric_semi_derivative(l, v1(0), v1(1), line) == doctest::Approx((alpha - beta) / 2));

    const ScalarField sq = [](const Vec& x) { return x[0] * x[0]; };
    CHECK(semi_derivative(sq, v1(1), v1(1), Side::Plus, line) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(semi_derivative(sq, v1(1), v1(1), Side::Minus, line) == doctest::Approx(2.0).epsilon(1e-9));

    const ScalarField jump = [](const Vec& x) { return x[0] > 0.0 ? 1.0 : 0.0; };
    CHECK(semi_derivative(jump, v1(0), v1(1), Side::Plus, line) == INFINITY);

    const ScalarField wiggle = [](const Vec& x) { return x[0] == 0.0 ? 0.0 : x[0] * std::sin(1.0 / x[0]); };
    CHECK_THROWS_AS(semi_derivative(wiggle, v1(0), v1(1), Side::Plus, line), Error);
}

TEST_CASE("property: D^-_v = -D^+_{-v}") {
    const ConfigurationSpace s = sphere_space(std::sqrt(2.0));
    const Model m = octahedron();
    const ScalarField ell = [&](const Vec& z) { return m.ell(z); };
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
        const Vec x = s.random_point(rng);
        const Vec u = s.random_tangent(x, rng);
        const double minus = semi_derivative(ell, x, u, Side::Minus, s);
        const double plus_neg = semi_derivative(ell, x, -u, Side::Plus, s);
        CHECK(minus == -plus_neg);
    }
}

TEST_CASE("octahedron vertex is a cusp") {
    // moving e3 by theta towards +-e2 gives c = sin(theta) with one neighbour, D = 8c(1+c),
    // so ell grows like 8 theta / 6 on both sides
    const Model m = octahedron();
    const ScalarField ell = [&](const Vec& z) { return m.ell(z); };
    const SemiDerivReport r = nabla_jet(ell, rotation_family(e1).generator, e3, m.space);
    CHECK(r.plus == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
    CHECK(r.minus == doctest::Approx(-4.0 / 3.0).epsilon(1e-6));
    CHECK(r.symmetric == doctest::Approx(0.0));
    CHECK_FALSE(r.differentiable);
}

TEST_CASE("nabla of a scalar-only jet") {
    const Model m = octahedron();
    const ScalarField ell = [&](const Vec& z) { return m.ell(z); };
    const Vec x = v3(1, 1, 0).normalized();
    const Jet a = Jet::scalar_only([](const Vec& z) { return 2.0 + z[0]; }, 3);
    const SemiDerivReport r = nabla_jet(ell, a, x, m.space);
    CHECK(r.plus == doctest::Approx((2.0 + x[0]) * m.ell(x)));
    CHECK(r.differentiable);
}

TEST_CASE("property: weak EL inequality on the octahedron") {
    const Model m = octahedron();
    const ScalarField ell = [&](const Vec& z) { return m.ell(z); };
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (const Vec& x : m.measure.points)
        for (int k = 0; k < 100; ++k) {
            const double a = g(rng);
            const Vec u = m.space.random_tangent(x, rng) * std::abs(g(rng));
            Jet j;
            j.scalar = [a](const Vec&) { return a; };
            j.vector = [u](const Vec&) { return u; };
            const SemiDerivReport r = nabla_jet(ell, j, x, m.space);
            CHECK(r.plus >= -1e-6);
        }
}

TEST_CASE("lattice jets: phi directions differentiable, space-time translations not") {
    const LatticeParams p;
    const Model lm = lattice_model(p, 9, 9);
    const ScalarField ell = [&](const Vec& z) { return lm.ell(z); };
    const Vec x = lattice_point(0, 0);
    const Jet phi = lattice_jet([](int, int) { return 0.0; }, [](int t, int s) { return 1.0 + 0.1 * t - 0.2 * s; });
    CHECK(nabla_jet(ell, phi, x, lm.space).differentiable);
    for (const auto& [vt, vs] : std::vector<std::pair<double, double>>{{1, 0}, {0, 1}, {0.6, -0.8}})
        CHECK_FALSE(nabla_jet(ell, lattice_translation_jet(vt, vs), x, lm.space).differentiable);
}

TEST_CASE("linearized field equations") {
    const Model m = octahedron();
    const Jet u = rotation_family(v3(0.3, -0.2, 0.9).normalized()).generator;
    for (const Vec& x : m.measure.points)
        CHECK(std::abs(linearized_residual(m, rotation_family(e3), u, x)) <= 1e-6);

    // lattice: b solves the scalar recurrence b(t+1) = -(lambda_A / lambda_I) b(t) - b(t-1)
    const LatticeParams p;
    const Model lm = lattice_model(p, 9, 9);
    auto bsol = [](int t, int s) {
        double prev = 0.0, cur = 1.0;  // b(-1) = 0, b(0) = 1
        if (t == -1) return 0.0;
        for (int k = 0; k < t; ++k) {
            const double next = -2.5 * cur - prev;
            prev = cur;
            cur = next;
        }
        return s == 0 && t >= 0 ? cur : 0.0;
    };
    const SiteFunction zero = [](int, int) { return 0.0; };
    const SiteFunction b_ok = [&](int t, int s) { return t >= -1 && t <= 2 ? bsol(t, s) : 0.0; };
    const Jet ua = lattice_jet([](int t, int s) { return t == 0 && s == 0 ? 1.0 : 0.0; }, zero);
    CHECK(std::abs(linearized_residual(lm, lattice_family(b_ok, zero), ua, lattice_point(0, 0))) <= 1e-10);

    // add 0.1 at the origin: the residual at the origin changes by lambda_A * 0.1
    const SiteFunction b_bad = [&](int t, int s) { return b_ok(t, s) + (t == 0 && s == 0 ? 0.1 : 0.0); };
    CHECK(linearized_residual(lm, lattice_family(b_bad, zero), ua, lattice_point(0, 0)) ==
          doctest::Approx(p.lambda_A * 0.1).epsilon(1e-6));
}

TEST_CASE("stochastic term") {
    const Model q = smooth_octahedron();
    const Jet w = rotation_family(e2).generator;
    for (const Vec& x : q.measure.points)
        CHECK(std::abs(stochastic_chi(q, weighted_rotation_family(e1, [](const Vec& z) { return z[0]; }), w.vector, x)) <=
              1e-6);

    // oracle: D(c) = 8c(1+c) on the positive side gives symmetric derivative 4 per interacting pair;
    // with weights exp(tau x_0) and rotation about e1, chi(+-e3) = sum_j c_j (+-4) / 6 = +-4/3
    const Model m = octahedron();
    const VariationFamily fam = weighted_rotation_family(e1, [](const Vec& z) { return z[0]; });
    const double chi = stochastic_chi(m, fam, w.vector, e3);
    CHECK(chi == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
    CHECK(stochastic_chi(m, fam, w.vector, -e3) == doctest::Approx(-4.0 / 3.0).epsilon(1e-6));
    const double halved = stochastic_chi(m, fam, w.vector, e3, NestedSchedule{0.005, 5, 1e-2});
    CHECK(std::abs(halved - chi) <= 1e-3 * std::abs(chi));
    for (const Vec& x : {e1, e2, Vec(-e1), Vec(-e2)}) CHECK(std::abs(stochastic_chi(m, fam, w.vector, x)) <= 1e-6);
}

TEST_CASE("cusp toy: nested difference gives (alpha' - beta') / 2 of either sign") {
    for (const auto& [da, db] : std::vector<std::pair<double, double>>{{0.7, 0.2}, {0.1, 0.9}}) {
        const double alpha = 1.0, beta = 2.0;
        auto l = [&](double tau, double x) { return x >= 0.0 ? (alpha + tau * da) * x : -(beta + tau * db) * x; };
        auto k = [&](double s, double tau) { return l(tau, s) - l(tau, -s); };
        CHECK(nested_chi(k) == doctest::Approx((da - db) / 2.0).epsilon(1e-8));
    }
}

TEST_CASE("symmetric derivatives over regions") {
    const Model m = octahedron();
    const VectorField w = [](const Vec& x) -> Vec {
        const Vec d = v3(0.2, 0.5, -0.4);
        return d - d.dot(x) * x;
    };
    double oracle = 0.0;
    const ScalarField ell = [&](const Vec& z) { return m.ell(z); };
    for (std::size_t i = 0; i < 6; ++i) {
        const Vec& x = m.measure.points[i];
        oracle += m.measure.weights[i] * symmetric_semi_derivative(ell, x, w(x), m.space);
    }
    CHECK(symmetric_derivative_region(m, {0, 1, 2, 3, 4, 5}, w) == doctest::Approx(oracle).epsilon(1e-9));
    const Vec x4 = m.measure.points[4];
    CHECK(symmetric_derivative_region(m, {4}, w) ==
          doctest::Approx(m.measure.weights[4] * symmetric_semi_derivative(ell, x4, w(x4), m.space)).epsilon(1e-9));
    const Model q = smooth_octahedron();
    CHECK(std::abs(symmetric_derivative_region(q, {0, 1, 2, 3, 4, 5}, w)) <= 1e-8);
}

TEST_CASE("second-order equation") {
    const Model q = smooth_octahedron();
    const VariationFamily lin = weighted_rotation_family(e3, [](const Vec& z) { return 0.5 * z[1]; });
    const Jet w = rotation_family(e1).generator;
    for (const Vec& x : q.measure.points) {
        const SecondOrderReport r = second_order_residual(q, lin, w, x);
        CHECK(std::abs(r.residual) <= 1e-5);
    }

    const Model m = octahedron();
    const VariationFamily fam = weighted_rotation_family(e1, [](const Vec& z) { return z[0]; });
    const SecondOrderReport r = second_order_residual(m, fam, Jet::vector_only(rotation_family(e2).generator.vector), e3);
    CHECK(std::abs(r.residual) <= 1e-6 * std::max(1.0, std::abs(r.lhs)));
    CHECK(r.chi1 == doctest::Approx(4.0 / 3.0).epsilon(1e-6));

    const LatticeParams p;
    const Model lm = lattice_model(p, 9, 9);
    const SiteFunction zero = [](int, int) { return 0.0; };
    const VariationFamily rot = lattice_family(zero, [](int, int) { return 1.0; });
    const Jet wl = lattice_jet(zero, [](int t, int) { return t == 0 ? 1.0 : 0.0; });
    CHECK(std::abs(second_order_residual(lm, rot, wl, lattice_point(0, 0)).chi2) <= 1e-6);
}

TEST_CASE("property: commutator law on a smooth space") {
    const ConfigurationSpace s = quadratic_sphere_space();
    Jet u, v;
    u.scalar = [](const Vec& x) { return x[0]; };
    u.vector = [](const Vec& x) -> Vec { return Eigen::Vector3d(1, 0, 0).cross(Eigen::Vector3d(x)); };
    v.scalar = [](const Vec& x) { return x[1] * x[1]; };
    v.vector = [](const Vec& x) -> Vec {
        const Vec d = v3(x[2], 0.3, -x[0]);
        return d - d.dot(x) * x;
    };
    const ScalarField f = [](const Vec& x) { return x[0] * x[1] + x[2] * x[2]; };
    auto D = [&](const VectorField& w, const ScalarField& g, double h) {
        return ScalarField([&s, w, g, h](const Vec& x) {
            return (g(flow(s, w, x, h)) - g(flow(s, w, x, -h))) / (2.0 * h);
        });
    };
    auto nabla = [&](const Jet& j, const ScalarField& g, double h) {
        const ScalarField dg = D(j.vector, g, h);
        return ScalarField([j, g, dg](const Vec& x) { return j.scalar(x) * g(x) + dg(x); });
    };
    const Jet c = jet_commutator(u, v, s);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 10; ++k) {
        const Vec x = s.random_point(rng);
        const double lhs = c.scalar(x) * f(x) + D(c.vector, f, 1e-4)(x);
        const double rhs = nabla(u, nabla(v, f, 1e-4), 1e-3)(x) - nabla(v, nabla(u, f, 1e-4), 1e-3)(x);
        CHECK(std::abs(lhs - rhs) <= 1e-5);
    }
}

TEST_CASE("rotation families are flows") {
    const VariationFamily r = rotation_family(v3(1, 2, 2).normalized());
    const Vec x = v3(0.6, 0, 0.8);
    CHECK((r.F(0.3, r.F(0.4, x)) - r.F(0.7, x)).norm() < 1e-12);
    CHECK(r.F(0.0, x) == x);
    CHECK(r.f(0.0, x) == 1.0);
    CHECK(r.is_flow);
}

}  // TEST_SUITE
