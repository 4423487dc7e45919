#include "cfs/dirac.hpp"

#include <algorithm>
#include <cmath>

namespace cfs {

void DiracConfig::validate() const {
    if (!(mass > 0.0)) fail(ErrorCode::InvalidParams, "mass must be positive");
    if (!(a > 0.0)) fail(ErrorCode::InvalidParams, "lattice spacing must be positive");
    if (N < 4 || (N & (N - 1)) != 0) fail(ErrorCode::InvalidParams, "N must be a power of two >= 4");
    if (T < 1) fail(ErrorCode::InvalidParams, "T must be >= 1");
    if (!(reg >= 0.0)) fail(ErrorCode::InvalidParams, "reg must be >= 0");
}

CMat gamma0() {
    CMat g(2, 2);
    g << 1.0, 0.0, 0.0, -1.0;
    return g;
}

CMat gamma1() {
    const cplx i(0.0, 1.0);
    CMat g(2, 2);
    g << 0.0, i, i, 0.0;
    return g;
}

const CMat& spin_metric_1p1() {
    static const CMat g = gamma0();
    return g;
}

// k-slash for k = (-omega, k): k_j gamma^j = -omega gamma^0 - k gamma^1
static CMat kslash(double omega, double k) { return -omega * gamma0() - k * gamma1(); }

std::vector<PlaneWave> dirac_basis(const DiracConfig& cfg) {
    cfg.validate();
    std::vector<PlaneWave> out;
    out.reserve(cfg.N);
    for (int j = -cfg.N / 2; j < cfg.N / 2; ++j) {
        PlaneWave w;
        w.k = 2.0 * kPi * j / (cfg.N * cfg.a);
        w.omega = std::sqrt(cfg.mass * cfg.mass + w.k * w.k);
        // (k-slash - m) chi = 0 reads [-(omega + m), -i k; -i k, omega - m] chi = 0
        CVec chi(2);
        chi << cplx(0.0, -w.k), cplx(w.omega + cfg.mass, 0.0);
        chi /= chi.norm();
        w.chi = chi;
        out.push_back(std::move(w));
    }
    return out;
}

double dirac_residual(const PlaneWave& w, double mass) {
    return ((kslash(w.omega, w.k) - mass * CMat::Identity(2, 2)) * w.chi).norm();
}

static double damping(const DiracConfig& cfg, const PlaneWave& w) {
    return cfg.reg > 0.0 ? std::exp(-0.5 * cfg.reg * w.omega) : 1.0;
}

CfsPoint DiracSystem::point(std::size_t i, const NumericsConfig& num) const {
    if (i >= sites.size()) fail(ErrorCode::InvalidArgument, "site index out of range");
    const CMat& W = waves[i];
    std::vector<CVec> cols;
    cols.reserve(W.cols());
    for (int k = 0; k < W.cols(); ++k) cols.push_back(W.col(k));
    return local_correlation(cols, 1, spin_metric_1p1(), num);
}

DiracSystem build_cfs(const DiracConfig& cfg) {
    const auto basis = dirac_basis(cfg);
    DiracSystem sys;
    sys.cfg = cfg;
    const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.N));
    for (int t = 0; t < cfg.T; ++t)
        for (int s = 0; s < cfg.N; ++s) {
            CMat W(2, cfg.N);
            for (int k = 0; k < cfg.N; ++k) {
                const PlaneWave& w = basis[k];
                const double phase = (w.omega * t + w.k * s) * cfg.a;
                W.col(k) = w.chi * (std::polar(norm, phase) * damping(cfg, w));
            }
            sys.sites.push_back({t, s});
            sys.waves.push_back(std::move(W));
        }
    return sys;
}

CMat dirac_kernel(const std::vector<PlaneWave>& basis, const DiracConfig& cfg, int dt, int ds) {
    CMat P = CMat::Zero(2, 2);
    const CMat& g0 = spin_metric_1p1();
    for (const PlaneWave& w : basis) {
        const double d = damping(cfg, w);
        const cplx ph = std::polar(d * d / cfg.N, (w.omega * dt + w.k * ds) * cfg.a);
        P.noalias() -= ph * (w.chi * w.chi.adjoint()) * g0;
    }
    return P;
}

static std::array<cplx, 2> sorted_pair(cplx x, cplx y) {
    std::vector<cplx> v{x, y};
    sort_spectrum(v);
    return {v[0], v[1]};
}

ClosedChainResult kernel_closed_chain(const std::vector<PlaneWave>& basis, const DiracConfig& cfg, int dt, int ds) {
    if (dt == 0 && ds == 0) fail(ErrorCode::DegenerateSeparation, "closed chain needs x != y");
    ClosedChainResult r;
    // x - y = (-dt, -ds)
    r.P_xy = dirac_kernel(basis, cfg, -dt, -ds);
    r.P_yx = dirac_kernel(basis, cfg, dt, ds);
    r.A_xy = r.P_xy * r.P_yx;
    const double xi0 = dt * cfg.a, xi1 = ds * cfg.a;
    r.xi2 = xi0 * xi0 - xi1 * xi1;

    // A ~ a xi-slash + b with xi-slash = xi^0 gamma^0 - xi^1 gamma^1
    const CMat xs = xi0 * gamma0() - xi1 * gamma1();
    Eigen::MatrixXcd B(4, 2);
    Eigen::VectorXcd rhs(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            B(2 * i + j, 0) = xs(i, j);
            B(2 * i + j, 1) = i == j ? 1.0 : 0.0;
            rhs(2 * i + j) = r.A_xy(i, j);
        }
    const Eigen::VectorXcd c = B.colPivHouseholderQr().solve(rhs);
    r.decomposition.a_coef = c(0);
    r.decomposition.b_coef = c(1);
    const double an = rhs.norm();
    r.decomposition.residual = an > 0.0 ? (B * c - rhs).norm() / an : 0.0;

    Eigen::ComplexEigenSolver<CMat> es(r.A_xy, false);
    r.eigs = sorted_pair(es.eigenvalues()[0], es.eigenvalues()[1]);
    const cplx root = std::sqrt(c(0) * c(0) * r.xi2);
    r.predicted_eigs = sorted_pair(c(1) + root, c(1) - root);
    return r;
}

static double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CausalMapReport causal_map_compare(const DiracConfig& cfg, double threshold, const NumericsConfig& num) {
    if (!(threshold >= 0.0)) fail(ErrorCode::InvalidArgument, "threshold must be >= 0");
    const auto basis = dirac_basis(cfg);
    CausalMapReport rep;
    rep.threshold = threshold;
    long long agree = 0;
    std::vector<double> residuals, mismatches;
    for (int dt = -(cfg.T - 1); dt <= cfg.T - 1; ++dt)
        for (int ds = -cfg.N / 2; ds < cfg.N / 2; ++ds) {
            if (dt == 0 && ds == 0) continue;
            const double xi2 = (dt * dt - ds * ds) * cfg.a * cfg.a;
            if (std::abs(xi2) < threshold * cfg.a * cfg.a) continue;
            const ClosedChainResult cc = kernel_closed_chain(basis, cfg, dt, ds);
            const long long mult = static_cast<long long>(cfg.T - std::abs(dt)) * cfg.N;
            const CausalClass cls = classify_spectrum({cc.eigs[0], cc.eigs[1]}, num.tol_class);
            const bool ok = (cls.kind == CausalKind::Spacelike && xi2 < 0.0) ||
                            (cls.kind == CausalKind::Timelike && xi2 > 0.0);
            rep.pairs += mult;
            ++rep.separations;
            if (ok)
                agree += mult;
            else
                rep.disagreements.push_back({ds, dt});
            const double scale = std::max(std::abs(cc.eigs[0]), std::abs(cc.eigs[1]));
            residuals.push_back(cc.decomposition.residual);
            if (scale == 0.0) continue;
            if (cls.kind == CausalKind::Spacelike) {
                rep.spacelike_classified += mult;
                rep.max_conjugate_deviation =
                    std::max(rep.max_conjugate_deviation, std::abs(cc.eigs[0] - std::conj(cc.eigs[1])) / scale);
            } else if (cls.kind == CausalKind::Timelike) {
                rep.timelike_classified += mult;
                const double d = std::max(std::abs(cc.predicted_eigs[0] - cc.eigs[0]),
                                          std::abs(cc.predicted_eigs[1] - cc.eigs[1])) / scale;
                mismatches.push_back(d);
                rep.max_eigen_mismatch = std::max(rep.max_eigen_mismatch, d);
            }
        }
    rep.agreement = rep.pairs ? static_cast<double>(agree) / static_cast<double>(rep.pairs) : 0.0;
    rep.median_eigen_mismatch = median(mismatches);
    rep.median_residual = median(residuals);
    rep.max_residual = residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
    return rep;
}

}  // namespace cfs
