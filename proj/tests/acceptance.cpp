// One pass/fail line per acceptance criterion, with the measured values and runtime.
#include "cfs/dirac.hpp"
#include "cfs/lattice.hpp"
#include "cfs/surface_layer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace cfs;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    // records a sub-check; the detail line lists every measured quantity
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

const double kTau = std::sqrt(2.0);

Model octahedron() { return Model{sphere_space(kTau), fixture_measure("octahedron"), 16.0 / 3.0, 0.0}; }

Verdict octahedron_el() {
    Verdict v;
    const ConfigurationSpace s = sphere_space(kTau);
    const DiscreteMeasure oct = fixture_measure("octahedron");
    const ElReport r = el_residual(oct, s, 0.0, fibonacci_sphere(10000));
    const double S = action(oct, s);
    v.check(r.max_abs_support <= 1e-9, "max|ell| on support " + fmt("%.3g", r.max_abs_support) + " <= 1e-9");
    v.check(r.inf_probe >= -1e-6, "inf over 1e4 probes " + fmt("%.3g", r.inf_probe) + " >= -1e-6");
    v.check(std::abs(S - 8.0 / 3.0) <= 1e-9, "action " + fmt("%.15g", S) + " = 8/3 +- 1e-9");
    return v;
}

Verdict octahedron_cusp() {
    Verdict v;
    const Model m = octahedron();
    const ScalarField ell = [&](const Vec& z) { return m.ell(z); };
    std::mt19937_64 rng(2024);
    double lo = INFINITY;
    int bad = 0;
    for (const Vec& x : m.measure.points)
        for (int k = 0; k < 50; ++k) {
            const Vec u = m.space.random_tangent(x, rng);
            const double p = semi_derivative(ell, x, u, Side::Plus, m.space);
            const double q = semi_derivative(ell, x, -u, Side::Plus, m.space);
            lo = std::min({lo, p, q});
            if (!(p > 1e-3 && q > 1e-3)) ++bad;
        }
    v.check(bad == 0, "min over 6 x 50 directions of D+_u, D+_-u = " + fmt("%.6g", lo) + " > 1e-3");
    return v;
}

Verdict sphere_minimization() {
    Verdict v;
    std::vector<std::uint64_t> seeds(10);
    for (int i = 0; i < 10; ++i) seeds[i] = static_cast<std::uint64_t>(i);
    const auto runs = minimize_many(sphere_space(kTau), 6, AnnealConfig{}, seeds, default_threads());
    int ok = 0;
    for (const AnnealResult& r : runs) {
        const std::vector<double> ang = pairwise_angles(r.measure.points);
        bool shape = ang.size() == 15;
        for (std::size_t i = 0; shape && i < 15; ++i) shape = std::abs(ang[i] - (i < 12 ? kPi / 2 : kPi)) <= 1e-3;
        if (r.action <= 8.0 / 3.0 + 1e-6 && shape) ++ok;
    }
    v.check(ok >= 8, std::to_string(ok) + "/10 seeds reach 8/3 + 1e-6 with octahedral angles (need 8)");
    return v;
}

Verdict lattice_minimizer() {
    Verdict v;
    const LatticeParams p;
    const LatticeElReport r = lattice_el_check(p, 41, 41, lattice_probes());
    v.check(r.el.nu == 18.0, "nu " + fmt("%.17g", r.el.nu) + " = 18");
    v.check(r.el.max_abs_support <= 1e-12,
            "max|ell| on " + std::to_string(r.interior_sites) + " interior sites " + fmt("%.3g", r.el.max_abs_support));
    v.check(r.min_off_lattice >= 5.0 - 1e-9, "off-lattice min ell " + fmt("%.12g", r.min_off_lattice) + " >= 5 - 1e-9");
    // the analytic minimum is exactly 1; the eigensolver lands 2e-14 below it
    const double lrho = lattice_lrho_bound(p, 8, 8, Boundary::Periodic);
    v.check(lrho >= 1.0 - 1e-12, "periodic 8x8 L_rho min " + fmt("%.17g", lrho) + " >= 1 (1e-12 slack)");
    return v;
}

LatticeField delta_field(double v_now, double v_prev) {
    LatticeField f = LatticeField::zeros(-6, 13);
    f.t = -1;
    f.v1[f.index(0)] = v_now;
    f.v0[f.index(0)] = v_prev;
    return f;
}

Verdict lattice_conservation() {
    Verdict v;
    const LatticeParams p;
    double worst_s = 0.0, worst_phi = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const LatticeConservation c =
            conservation_report(random_compact_field(10, 100, 2 * k), random_compact_field(10, 100, 2 * k + 1), p, 100);
        for (double d : c.drift_scalar) worst_s = std::max(worst_s, d);
        for (double d : c.drift_phi) worst_phi = std::max(worst_phi, d);
    }
    v.check(worst_s <= 1e-10, "scalar drift " + fmt("%.3g", worst_s));
    v.check(worst_phi <= 1e-10, "phi drift " + fmt("%.3g", worst_phi));
    LatticeField a = evolve_linearized(delta_field(1, 0), p, 1), b = evolve_linearized(delta_field(1, 1), p, 1);
    const double s0 = lattice_sigma_t(a, b, p).total();
    a = evolve_linearized(a, p, 1);
    b = evolve_linearized(b, p, 1);
    const double s1 = lattice_sigma_t(a, b, p).total();
    v.check(s0 == 1.0 && s1 == 1.0, "hand pair sigma_0 = " + fmt("%.17g", s0) + ", sigma_1 = " + fmt("%.17g", s1));
    return v;
}

Verdict noether() {
    Verdict v;
    const Model oct = octahedron();
    const std::vector<Vec> axes{v3(0, 0, 1), v3(1, 0, 0), v3(1, 1, 1).normalized()};
    const std::vector<std::vector<int>> regions{{4}, {0}, {0, 4}, {0, 1, 2}};
    double sym = 0.0, deriv = 0.0;
    for (const Vec& axis : axes) {
        const Flow fl = rotation_flow(axis);
        sym = std::max(sym, symmetry_check(oct, fl, SymmetryMode::Lagrangian, {1e-4, 0.1, -0.3, 1.0}));
        for (const auto& omega : regions) {
            const ConservationReport r =
                noether_derivative(oct, fl, RegionSplit::from_omega(omega, 6), SymmetryMode::Lagrangian);
            deriv = std::max(deriv, std::abs(r.derivative_estimate));
        }
    }
    v.check(sym <= 1e-10, "lagrangian symmetry violation " + fmt("%.3g", sym));
    v.check(deriv <= 1e-6, "max |noether derivative| over 3 axes x 4 regions " + fmt("%.3g", deriv));
    Model bent = oct;
    bent.measure.points[0] = rotation_matrix(v3(1, 1, 1).normalized(), 0.1) * Eigen::Vector3d(bent.measure.points[0]);
    const ConservationReport r =
        noether_derivative(bent, rotation_flow(v3(0, 0, 1)), RegionSplit::from_omega({0}, 6), SymmetryMode::Lagrangian);
    v.check(std::abs(r.derivative_estimate) > 1e-4, "perturbed control " + fmt("%.3g", r.derivative_estimate) + " > 1e-4");
    return v;
}

Verdict unitary_symmetry() {
    Verdict v;
    std::mt19937_64 rng(7);
    double worst = 0.0, trace = 0.0;
    const std::vector<std::array<int, 2>> shapes{{4, 1}, {4, 2}, {6, 1}, {6, 2}};
    for (int k = 0; k < 100; ++k) {
        const auto [dim, n] = shapes[k % 4];
        const CfsPoint x = random_point(dim, n, rng), y = random_point(dim, n, rng);
        const CMat A = random_hermitian(dim, rng);
        for (double tau : {0.1, 0.7}) {
            const double a = lagrangian(x, unitary_variation(A, tau, y)).L;
            const double b = lagrangian(unitary_variation(A, -tau, x), y).L;
            worst = std::max(worst, std::abs(a - b));
            const CfsPoint px = unitary_variation(A, tau, x);
            trace = std::max(trace, std::abs(px.matrix.trace().real() - x.matrix.trace().real()));
        }
    }
    v.check(worst <= 1e-10, "max |L(x, Phi y) - L(Phi^-1 x, y)| " + fmt("%.3g", worst));
    v.check(trace <= 1e-12, "max trace change " + fmt("%.3g", trace));
    return v;
}

Verdict bookkeeping() {
    Verdict v;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.5, 2.0), T(-0.5, 0.5);
    const ConfigurationSpace s = sphere_space(kTau);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = 3 + static_cast<int>(rng() % 10);
        std::vector<Vec> pts;
        std::vector<double> ws;
        for (int i = 0; i < n; ++i) {
            pts.push_back(s.random_point(rng));
            ws.push_back(W(rng));
        }
        Model m{s, make_measure(pts, ws, s), 0.0, 0.0};
        m.nu = el_residual(m.measure, s, 0.0, {}).nu;
        std::vector<int> omega;
        for (std::size_t i = 0; i < m.measure.size(); ++i)
            if (rng() % 2) omega.push_back(static_cast<int>(i));
        const Vec axis = v3(U(rng), U(rng), U(rng)), push = v3(U(rng), U(rng), U(rng));
        const Flow fl = k % 2 ? rotation_flow(axis)
                              : Flow([push](double tau, const Vec& x) -> Vec { return (x + tau * push).normalized(); });
        const BookkeepingIdentity id =
            prpuseful_identity(m, fl, RegionSplit::from_omega(omega, m.measure.size()), T(rng));
        worst = std::max(worst, std::abs(id.lhs - id.rhs) / std::max(1.0, id.scale));
    }
    v.check(worst <= 1e-12, "max |lhs - rhs| / scale over 100 instances " + fmt("%.3g", worst));
    return v;
}

Verdict dirac_causality() {
    Verdict v;
    const DiracConfig cfg;
    const CausalMapReport r = causal_map_compare(cfg, 4.0);
    v.check(r.agreement >= 0.9, "agreement " + fmt("%.6f", r.agreement) + " over " + std::to_string(r.pairs) + " pairs");
    v.check(r.max_conjugate_deviation <= 1e-9,
            "spacelike |l1 - conj l2| / |l| " + fmt("%.3g", r.max_conjugate_deviation));
    v.check(r.max_eigen_mismatch <= 1e-6, "timelike |b +- sqrt(a^2 xi^2) - eig| / |l| max " +
                                              fmt("%.3g", r.max_eigen_mismatch) + ", median " +
                                              fmt("%.3g", r.median_eigen_mismatch) + ", fit residual median " +
                                              fmt("%.3g", r.median_residual));
    return v;
}

Verdict balance() {
    Verdict v;
    Model smooth{quadratic_sphere_space(), fixture_measure("octahedron"), 0.0, 0.0};
    smooth.nu = 2.0 * integrated_lagrangian(v3(1, 0, 0), smooth.measure, smooth.space);
    const VariationFamily w = rotation_family(v3(1, 0, 0)), u = rotation_family(v3(0, 1, 0));
    const RegionSplit north = RegionSplit::from_omega({4}, 6);
    const BalanceReport s = nondiff_symplectic_balance(smooth, w, u, north);
    const double smax = std::max({std::abs(s.sigma), std::abs(s.chi_tilde_sum), std::abs(s.commutator_term)});
    v.check(smax <= 1e-6, "smooth space max term " + fmt("%.3g", smax));

    const Model oct = octahedron();
    const VariationFamily wx = weighted_rotation_family(v3(1, 0, 0), [](const Vec& z) { return z[0]; });
    const BalanceReport r = nondiff_symplectic_balance(oct, wx, u, north);
    const BalanceReport h = nondiff_symplectic_balance(oct, wx, u, north, NestedSchedule{0.005, 5, 1e-2});
    v.check(std::abs(r.sigma) >= 1e-3, "octahedron sigma " + fmt("%.6g", r.sigma));
    const double tol = 1e-3 * r.scale;
    v.check(std::abs(r.residual) <= tol, "octahedron residual " + fmt("%.3g", r.residual) + " (scale " +
                                             fmt("%.3g", r.scale) + ", chi~ " + fmt("%.6g", r.chi_tilde_sum) + ")");
    const double halving = std::max({std::abs(r.sigma - h.sigma), std::abs(r.chi_tilde_sum - h.chi_tilde_sum),
                                     std::abs(r.commutator_term - h.commutator_term)});
    v.check(halving <= tol, "step-halving change " + fmt("%.3g", halving));
    v.check(std::abs(r.alt_form - r.sigma) <= tol, "alternative form gap " + fmt("%.3g", r.alt_form - r.sigma));
    return v;
}

Verdict spectrum_consistency() {
    Verdict v;
    const DiracConfig cfg;
    const auto basis = dirac_basis(cfg);
    DiracConfig slab = cfg;
    slab.T = 8;
    const DiracSystem sys = build_cfs(slab);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, sys.size() - 1);
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        while (j == i) j = pick(rng);
        const DiracSite x = sys.sites[i], y = sys.sites[j];
        const ClosedChainResult cc = kernel_closed_chain(basis, cfg, y.t - x.t, y.s - x.s);
        const ProductSpectrum ps = product_spectrum(sys.point(i), sys.point(j));
        // conjugate pairs tie in modulus, so compare as unordered pairs
        const double scale = std::max(std::abs(ps.eigs[0]), 1e-300);
        const double same = std::max(std::abs(ps.eigs[0] - cc.eigs[0]), std::abs(ps.eigs[1] - cc.eigs[1]));
        const double swap = std::max(std::abs(ps.eigs[0] - cc.eigs[1]), std::abs(ps.eigs[1] - cc.eigs[0]));
        worst = std::max(worst, std::min(same, swap) / scale);
    }
    v.check(worst <= 1e-9, "max relative gap over 300 site pairs " + fmt("%.3g", worst));
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> expect_red, only;
    app.add_option("--expect-red", expect_red, "Criteria known to fail; exit 0 iff exactly these fail");
    app.add_option("--only", only, "Run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "octahedron EL check", 5, octahedron_el},
        {2, "octahedron cusp structure", 10, octahedron_cusp},
        {3, "sphere minimization", 120, sphere_minimization},
        {4, "lattice minimizer", 5, lattice_minimizer},
        {5, "lattice symplectic conservation", 5, lattice_conservation},
        {6, "noether conservation", 30, noether},
        {7, "unitary variation symmetry", 10, unitary_symmetry},
        {8, "bookkeeping identity", 10, bookkeeping},
        {9, "dirac causality recovery", 120, dirac_causality},
        {10, "non-differentiable balance", 60, balance},
        {11, "closed chain vs operator product spectrum", 10, spectrum_consistency},
    };

    std::set<int> red;
    for (const Criterion& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const Error& e) {
            v.check(false, std::string("error ") + to_string(e.code()) + ": " + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.check(secs < c.limit_s, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%g", c.limit_s) + " s");
        if (!v.pass) red.insert(c.id);
        std::printf("criterion %2d %s  %s: %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.str().c_str());
        std::fflush(stdout);
    }
    const std::set<int> expected(expect_red.begin(), expect_red.end());
    std::printf("failing criteria: %zu", red.size());
    for (int id : red) std::printf(" %d", id);
    std::printf("\n");
    return red == expected ? 0 : 1;
}
