#pragma once

#include "cfs/operator_core.hpp"

#include <array>
#include <vector>

namespace cfs {

/// Dirac sea on a 1+1 lattice: N periodic spatial sites, T time slices, spacing a.
struct DiracConfig {
    double mass = 0.5;
    int N = 64;
    double a = 1.0;
    int T = 32;
    double reg = 0.0;  // optional damping exp(-reg omega) of every momentum, 0 = sharp Brillouin zone

    /// mass > 0, a > 0, N >= 4 a power of two, T >= 1, reg >= 0.
    void validate() const;
};

/// gamma^0 = sigma_3, gamma^1 = i sigma_1.
CMat gamma0();
CMat gamma1();
/// Spin scalar product <psi|phi> = psi^dagger gamma^0 phi.
const CMat& spin_metric_1p1();

struct PlaneWave {
    double k = 0.0;
    double omega = 0.0;
    CVec chi;  // unit Euclidean norm
};

/// Negative-frequency solutions, one per momentum k = 2 pi j / (N a), j in [-N/2, N/2).
std::vector<PlaneWave> dirac_basis(const DiracConfig& cfg);
/// Norm of (k-slash - m) chi with k = (-omega, k).
double dirac_residual(const PlaneWave& w, double mass);

struct DiracSite {
    int t = 0;
    int s = 0;
};

/// Sites with the wave functions psi_k(x) = chi(k) exp(i(omega t + k x)) / sqrt(N) stored per site.
/// F(x) has dimension N, so points are built on demand.
struct DiracSystem {
    DiracConfig cfg;
    std::vector<DiracSite> sites;
    std::vector<CMat> waves;  // 2 x N per site

    std::size_t size() const { return sites.size(); }
    double weight() const { return 1.0 / static_cast<double>(sites.size()); }
    CfsPoint point(std::size_t i, const NumericsConfig& num = {}) const;
};

DiracSystem build_cfs(const DiracConfig& cfg);

/// P(x, y) = -sum_k psi_k(x) psi_k(y)^dagger gamma^0 for separation x - y = (dt, ds) in lattice units.
CMat dirac_kernel(const std::vector<PlaneWave>& basis, const DiracConfig& cfg, int dt, int ds);

struct ClosedChainDecomposition {
    cplx a_coef{0.0, 0.0};
    cplx b_coef{0.0, 0.0};
    double residual = 0.0;  // |A - a xi-slash - b| / |A|
};

struct ClosedChainResult {
    CMat P_xy;
    CMat P_yx;
    CMat A_xy;
    ClosedChainDecomposition decomposition;
    double xi2 = 0.0;  // <xi, xi> with xi = y - x in physical units
    std::array<cplx, 2> eigs{};                // eigensolver values, sorted
    std::array<cplx, 2> predicted_eigs{};      // b +- sqrt(a^2 xi^2), sorted
};

/// Closed chain of the sites separated by y - x = (dt, ds). Throws DegenerateSeparation when x = y.
ClosedChainResult kernel_closed_chain(const std::vector<PlaneWave>& basis, const DiracConfig& cfg, int dt, int ds);

struct CausalMapReport {
    double threshold = 0.0;
    double agreement = 0.0;
    long long pairs = 0;  // site pairs above threshold (each separation counted with its multiplicity)
    long long separations = 0;
    std::vector<std::array<int, 2>> disagreements;  // [dx, dt]
    long long spacelike_classified = 0;
    double max_conjugate_deviation = 0.0;  // spacelike-classified: |l1 - conj(l2)| / max|l|
    long long timelike_classified = 0;
    double max_eigen_mismatch = 0.0;       // timelike-classified: |predicted - eigensolver| / max|l|
    double median_eigen_mismatch = 0.0;
    double max_residual = 0.0;
    double median_residual = 0.0;
};

/// Compares the spectral classification of every separation with |xi^2| >= threshold a^2
/// against sign(xi^2). Separations (dt, ds) with ds taken as the minimal periodic image.
CausalMapReport causal_map_compare(const DiracConfig& cfg, double threshold, const NumericsConfig& num = {});

}  // namespace cfs
