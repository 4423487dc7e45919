#include "cfs/operator_core.hpp"

#include <algorithm>
#include <cmath>

namespace cfs {

const char* to_string(CausalKind kind) {
    switch (kind) {
    case CausalKind::Spacelike: return "spacelike";
    case CausalKind::Timelike: return "timelike";
    case CausalKind::Lightlike: return "lightlike";
    }
    return "unknown";
}

CfsPoint make_point(const CMat& matrix, int n, const NumericsConfig& cfg) {
    if (matrix.rows() != matrix.cols()) fail(ErrorCode::DimensionMismatch, "matrix is not square");
    if (n < 1) fail(ErrorCode::InvalidArgument, "spin dimension must be positive");
    const double norm = matrix.norm();
    const double asym = (matrix - matrix.adjoint()).norm();
    if (asym > cfg.tol_herm * norm) fail(ErrorCode::NotHermitian, "matrix is not Hermitian");

    CfsPoint p;
    p.matrix = 0.5 * (matrix + matrix.adjoint());
    p.spin_dim = n;
    if (p.matrix.rows() == 0) return p;
    Eigen::SelfAdjointEigenSolver<CMat> es(p.matrix, Eigen::EigenvaluesOnly);
    p.eigs = es.eigenvalues();
    const double scale = p.eigs.cwiseAbs().maxCoeff();
    int pos = 0, neg = 0;
    for (int i = 0; i < p.eigs.size(); ++i) {
        if (p.eigs[i] > cfg.tol_rank * scale) ++pos;
        if (p.eigs[i] < -cfg.tol_rank * scale) ++neg;
    }
    if (pos > n || neg > n)
        fail(ErrorCode::SignatureViolation, "signature (" + std::to_string(pos) + "," +
                                                std::to_string(neg) + ") exceeds (" +
                                                std::to_string(n) + "," + std::to_string(n) + ")");
    return p;
}

void sort_spectrum(std::vector<cplx>& eigs) {
    double scale = 0.0;
    for (const auto& e : eigs) scale = std::max(scale, std::abs(e));
    const double tie = 1e-12 * scale;
    // insertion sort: the tolerance-based comparator is not a strict weak order
    for (std::size_t i = 1; i < eigs.size(); ++i) {
        for (std::size_t j = i; j > 0; --j) {
            const cplx& a = eigs[j - 1];
            const cplx& b = eigs[j];
            const double ma = std::abs(a), mb = std::abs(b);
            bool swap;
            if (std::abs(ma - mb) > tie)
                swap = mb > ma;
            else
                swap = std::arg(b) < std::arg(a);
            if (!swap) break;
            std::swap(eigs[j - 1], eigs[j]);
        }
    }
}

std::vector<cplx> nontrivial_eigenvalues(const CMat& m, int count, const NumericsConfig& cfg) {
    std::vector<cplx> all;
    if (m.rows() > 0) {
        Eigen::ComplexEigenSolver<CMat> es(m, false);
        for (int i = 0; i < es.eigenvalues().size(); ++i) all.push_back(es.eigenvalues()[i]);
    }
    std::sort(all.begin(), all.end(), [](const cplx& a, const cplx& b) { return std::abs(a) > std::abs(b); });
    const double scale = all.empty() ? 0.0 : std::abs(all.front());
    std::vector<cplx> out;
    for (const auto& e : all) {
        if (static_cast<int>(out.size()) == count) break;
        if (scale > 0.0 && std::abs(e) > cfg.tol_rank * scale) out.push_back(e);
    }
    out.resize(count, cplx(0.0, 0.0));
    sort_spectrum(out);
    return out;
}

ProductSpectrum spectrum_from_eigs(std::vector<cplx> eigs) {
    ProductSpectrum s;
    s.eigs = std::move(eigs);
    for (const auto& e : s.eigs) {
        s.weight_abs += std::abs(e);
        s.weight_sq += std::norm(e);
    }
    return s;
}

static void check_pair(const CfsPoint& x, const CfsPoint& y) {
    if (x.dim() != y.dim() || x.spin_dim != y.spin_dim)
        fail(ErrorCode::DimensionMismatch, "points differ in dimension or spin dimension");
}

ProductSpectrum product_spectrum(const CfsPoint& x, const CfsPoint& y, const NumericsConfig& cfg) {
    check_pair(x, y);
    CMat xy = x.matrix * y.matrix;
    return spectrum_from_eigs(nontrivial_eigenvalues(xy, 2 * x.spin_dim, cfg));
}

LagrangianValue lagrangian_from_spectrum(const ProductSpectrum& s, int n, double kappa, double tol_class) {
    LagrangianValue v;
    v.bounded_term = s.weight_abs * s.weight_abs;
    double L = s.weight_sq - v.bounded_term / (2.0 * n);
    // L is a sum of squares analytically; small negatives are round-off
    if (L < 0.0 && L >= -1e-10 * v.bounded_term) L = 0.0;
    if (classify_spectrum(s.eigs, tol_class).kind == CausalKind::Spacelike) L = 0.0;
    v.L = L;
    v.L_kappa = L + kappa * v.bounded_term;
    return v;
}

LagrangianValue lagrangian(const CfsPoint& x, const CfsPoint& y, double kappa, const NumericsConfig& cfg) {
    return lagrangian_from_spectrum(product_spectrum(x, y, cfg), x.spin_dim, kappa, cfg.tol_class);
}

CausalClass classify_spectrum(const std::vector<cplx>& eigs, double tol) {
    CausalClass c;
    c.tol_used = tol;
    double lo = INFINITY, hi = 0.0;
    for (const auto& e : eigs) {
        lo = std::min(lo, std::abs(e));
        hi = std::max(hi, std::abs(e));
    }
    if (eigs.empty() || hi == 0.0 || hi - lo <= tol * hi) {
        c.kind = CausalKind::Spacelike;
        return c;
    }
    bool real = true;
    for (const auto& e : eigs) real = real && std::abs(e.imag()) <= tol * hi;
    c.kind = real ? CausalKind::Timelike : CausalKind::Lightlike;
    return c;
}

CausalClass causal_class(const CfsPoint& x, const CfsPoint& y, double tol, const NumericsConfig& cfg) {
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "classification tolerance must be positive");
    return classify_spectrum(product_spectrum(x, y, cfg).eigs, tol);
}

CfsPoint local_correlation(const std::vector<CVec>& waves, int n, const CMat& spin_metric,
                           const NumericsConfig& cfg) {
    const int f = static_cast<int>(waves.size());
    const int d = static_cast<int>(spin_metric.rows());
    CMat W(d, f);
    for (int i = 0; i < f; ++i) {
        if (waves[i].size() != d) fail(ErrorCode::DimensionMismatch, "spinor dimension differs from spin metric");
        W.col(i) = waves[i];
    }
    CMat F = -(W.adjoint() * spin_metric * W);
    return make_point(F, n, cfg);
}

// Orthonormal basis of the image of a Hermitian matrix.
static CMat image_basis(const CfsPoint& x, const NumericsConfig& cfg) {
    Eigen::SelfAdjointEigenSolver<CMat> es(x.matrix);
    const Vec& ev = es.eigenvalues();
    const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
        if (scale > 0.0 && std::abs(ev[i]) > cfg.tol_rank * scale) keep.push_back(i);
    CMat B(x.dim(), static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) B.col(static_cast<int>(j)) = es.eigenvectors().col(keep[j]);
    return B;
}

KernelChain kernel_and_chain(const CfsPoint& x, const CfsPoint& y, const NumericsConfig& cfg) {
    check_pair(x, y);
    const CMat Bx = image_basis(x, cfg);
    const CMat By = image_basis(y, cfg);
    KernelChain k;
    k.P_xy = Bx.adjoint() * y.matrix * By;
    k.P_yx = By.adjoint() * x.matrix * Bx;
    k.A_xy = k.P_xy * k.P_yx;
    k.rank_deficient = Bx.cols() < 2 * x.spin_dim;
    return k;
}

CMat unitary_exp(const CMat& A, double tau) {
    Eigen::SelfAdjointEigenSolver<CMat> es(A);
    CVec phase(es.eigenvalues().size());
    for (int i = 0; i < phase.size(); ++i) phase[i] = std::exp(cplx(0.0, tau * es.eigenvalues()[i]));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

CfsPoint unitary_variation(const CMat& A, double tau, const CfsPoint& x, const NumericsConfig& cfg) {
    if (A.rows() != x.dim() || A.cols() != x.dim()) fail(ErrorCode::DimensionMismatch, "generator dimension");
    if ((A - A.adjoint()).norm() > cfg.tol_herm * std::max(1.0, A.norm()))
        fail(ErrorCode::NotHermitian, "generator is not Hermitian");
    const CMat U = unitary_exp(0.5 * (A + A.adjoint()), tau);
    return make_point(U * x.matrix * U.adjoint(), x.spin_dim, cfg);
}

bool trace_matches(const CfsPoint& x, double c, double tol) {
    return std::abs(x.matrix.trace().real() - c) <= tol * std::max(1.0, std::abs(c));
}

CMat random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMat m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = cplx(g(rng), g(rng));
    return 0.5 * (m + m.adjoint());
}

CfsPoint random_point(int dim, int n, std::mt19937_64& rng) {
    if (2 * n > dim) fail(ErrorCode::InvalidArgument, "2n exceeds the Hilbert space dimension");
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    CMat m(dim, 2 * n);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < 2 * n; ++j) m(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<CMat> qr(m);
    CMat Q = qr.householderQ() * CMat::Identity(dim, 2 * n);
    Vec d(2 * n);
    for (int j = 0; j < 2 * n; ++j) d[j] = (j < n ? 1.0 : -1.0) * mag(rng);
    CMat x = Q * d.cast<cplx>().asDiagonal() * Q.adjoint();
    return make_point(x, n);
}

}  // namespace cfs
