#pragma once

#include "cfs/common.hpp"

#include <random>
#include <vector>

namespace cfs {

/// Finite-rank self-adjoint operator with at most n positive and n negative
/// eigenvalues. Only make_point builds validated instances.
struct CfsPoint {
    CMat matrix;
    int spin_dim = 1;
    Vec eigs;  // ascending, cached at construction

    int dim() const { return static_cast<int>(matrix.rows()); }
};

/// The 2n nontrivial eigenvalues of xy, zero-padded, ordered by modulus
/// (descending) then argument (ascending).
struct ProductSpectrum {
    std::vector<cplx> eigs;
    double weight_abs = 0.0;  // sum |lambda|
    double weight_sq = 0.0;   // sum |lambda|^2
};

struct LagrangianValue {
    double L = 0.0;
    double L_kappa = 0.0;
    double bounded_term = 0.0;  // |xy|^2
};

enum class CausalKind { Spacelike, Timelike, Lightlike };
const char* to_string(CausalKind kind);

struct CausalClass {
    CausalKind kind = CausalKind::Spacelike;
    double tol_used = 0.0;
};

struct KernelChain {
    CMat P_xy;  // S_y -> S_x in orthonormal bases of the images
    CMat P_yx;  // S_x -> S_y
    CMat A_xy;  // closed chain P_xy P_yx on S_x
    bool rank_deficient = false;  // dim S_x < 2n (informational)
};

/// @brief Validate a matrix as a point of F. Symmetrizes away round-off below tol_herm.
CfsPoint make_point(const CMat& matrix, int n, const NumericsConfig& cfg = {});

/// Sorts in place with the deterministic spectrum ordering.
void sort_spectrum(std::vector<cplx>& eigs);

/// Nontrivial eigenvalues of an arbitrary square matrix, padded to `count`.
std::vector<cplx> nontrivial_eigenvalues(const CMat& m, int count, const NumericsConfig& cfg = {});

ProductSpectrum product_spectrum(const CfsPoint& x, const CfsPoint& y, const NumericsConfig& cfg = {});
ProductSpectrum spectrum_from_eigs(std::vector<cplx> eigs);

/// L = |(xy)^2| - |xy|^2 / (2n), L_kappa = L + kappa |xy|^2. L is exactly 0 when the spectrum
/// classifies as spacelike at tol_class.
LagrangianValue lagrangian(const CfsPoint& x, const CfsPoint& y, double kappa = 0.0,
                           const NumericsConfig& cfg = {});
LagrangianValue lagrangian_from_spectrum(const ProductSpectrum& s, int n, double kappa = 0.0,
                                         double tol_class = NumericsConfig{}.tol_class);

CausalClass causal_class(const CfsPoint& x, const CfsPoint& y, double tol, const NumericsConfig& cfg = {});
CausalClass classify_spectrum(const std::vector<cplx>& eigs, double tol);

/// @brief F^i_j = -<psi_i | psi_j> in the indefinite spin form.
/// @param waves f spinors of dimension spin_metric.rows(), the basis evaluated at one point.
CfsPoint local_correlation(const std::vector<CVec>& waves, int n, const CMat& spin_metric,
                           const NumericsConfig& cfg = {});

KernelChain kernel_and_chain(const CfsPoint& x, const CfsPoint& y, const NumericsConfig& cfg = {});

/// x -> U x U^{-1} with U = exp(i tau A).
CfsPoint unitary_variation(const CMat& A, double tau, const CfsPoint& x, const NumericsConfig& cfg = {});
CMat unitary_exp(const CMat& A, double tau);

/// Trace check for callers that fix the trace constraint value.
bool trace_matches(const CfsPoint& x, double c, double tol = 1e-12);

/// Random point of F: a random 2n-dimensional subspace carrying n positive and
/// n negative eigenvalues of magnitude in [0.5, 2].
CfsPoint random_point(int dim, int n, std::mt19937_64& rng);
CMat random_hermitian(int dim, std::mt19937_64& rng);

}  // namespace cfs
