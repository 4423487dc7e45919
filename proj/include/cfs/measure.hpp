#pragma once

#include "cfs/common.hpp"
#include "cfs/operator_core.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace cfs {

/// A space F with its Lagrangian. Points are ambient coordinate vectors; the
/// retraction `move(x, u, h)` follows the curve starting at x with velocity u.
struct ConfigurationSpace {
    std::string name;
    std::function<double(const Vec&, const Vec&)> lagrangian;
    std::function<double(const Vec&, const Vec&)> bounded_term;  // optional, enters L_kappa
    std::function<Vec(const Vec&, const Vec&, double)> move;
    std::function<Vec(const Vec&, const Vec&)> tangent;  // projection onto T_x F
    std::function<double(const Vec&, const Vec&)> distance;
    std::function<Vec(std::mt19937_64&)> random_point;
    int tangent_dim = 0;  // intrinsic dimension, for proposal moves

    double L(const Vec& x, const Vec& y, double kappa = 0.0) const;
    /// Unit tangent vector at x drawn from an isotropic Gaussian.
    Vec random_tangent(const Vec& x, std::mt19937_64& rng) const;
};

/// S^2 with L = max(0, D), D = 2 tau^2 (1+c)(2 - tau^2 (1-c)), c = <x,y>.
ConfigurationSpace sphere_space(double tau);
/// S^2 with the smooth Lagrangian 1 + <x,y>^2; used where every derivative is two-sided.
ConfigurationSpace quadratic_sphere_space();
/// Hermitian f x f matrices with signature bound (n,n), packed as f^2 reals
/// (diagonal, then real/imaginary parts of the upper triangle).
ConfigurationSpace operator_space(int f, int n, const NumericsConfig& cfg = {});
Vec pack_hermitian(const CMat& m);
CMat unpack_hermitian(const Vec& v);

/// @brief D from the sphere example; throws NotUnitVector when |x| or |y| differs from 1 by more than 1e-10.
double sphere_lagrangian(const Vec& x, const Vec& y, double tau);

struct DiscreteMeasure {
    std::vector<Vec> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double total_volume() const;
};

/// Validates positive weights and merges points closer than `merge_tol` in the space metric.
DiscreteMeasure make_measure(std::vector<Vec> points, std::vector<double> weights,
                             const ConfigurationSpace& space, double merge_tol = 1e-8);
DiscreteMeasure counting_measure(std::vector<Vec> points, double total = 1.0);

/// S = sum_ij w_i w_j L_kappa(x_i, x_j), diagonal included.
double action(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa = 0.0);
/// sum_j w_j L_kappa(x, x_j), the unshifted integral.
double integrated_lagrangian(const Vec& x, const DiscreteMeasure& m, const ConfigurationSpace& space,
                             double kappa = 0.0);
/// ell(x) = sum_j w_j L_kappa(x, x_j) - nu/2.
double ell(const Vec& x, const DiscreteMeasure& m, double nu, const ConfigurationSpace& space,
           double kappa = 0.0);

struct ElReport {
    double nu = 0.0;
    std::vector<double> ell_on_support;
    double inf_probe = 0.0;
    double max_abs_support = 0.0;
    Vec argmin_probe;
    bool satisfied(double tol) const { return max_abs_support <= tol && inf_probe >= -tol; }
};

/// nu = 2 min over probes and support of sum_j w_j L_kappa(., x_j).
ElReport el_residual(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa,
                     const std::vector<Vec>& probes);
/// Same report with a caller-fixed nu.
ElReport el_residual_fixed_nu(const DiscreteMeasure& m, const ConfigurationSpace& space, double kappa,
                              const std::vector<Vec>& probes, double nu);

/// Smallest eigenvalue of K_ij = sqrt(w_i w_j) L_kappa(x_i,x_j) on {phi : sum sqrt(w_i) phi_i = 0}.
double lrho_min_constrained_eigenvalue(const DiscreteMeasure& m, const ConfigurationSpace& space,
                                       double kappa = 0.0);
/// The projected eigenproblem for a precomputed kernel matrix.
double constrained_min_eigenvalue(const Eigen::MatrixXd& L, const std::vector<double>& weights);

/// A measure with its space, nu and kappa: everything ell needs.
struct Model {
    ConfigurationSpace space;
    DiscreteMeasure measure;
    double nu = 0.0;
    double kappa = 0.0;

    double L(const Vec& x, const Vec& y) const { return space.L(x, y, kappa); }
    double ell(const Vec& x) const { return cfs::ell(x, measure, nu, space, kappa); }
};

/// Quasi-uniform Fibonacci points on S^2.
std::vector<Vec> fibonacci_sphere(int count);

/// "octahedron", "sphere-random(N)", "lattice(AxB)" (t-extent x s-extent, centred at 0).
DiscreteMeasure fixture_measure(const std::string& name, std::uint64_t seed = 0);

struct AnnealConfig {
    int steps = 30000;
    double T0 = 0.2;
    double cooling = 0.9997;        // geometric factor per step
    double proposal_sigma = 0.3;    // tangent step at T0; shrinks with sqrt(T/T0)
    int polish_rounds = 400;
    void validate() const;
};

struct AnnealResult {
    DiscreteMeasure measure;
    double action = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> trajectory;  // best action after each block of 100 steps
};

/// Equal-weight (1/N) search by simulated annealing followed by a pattern-search polish.
AnnealResult minimize_counting_measure(const ConfigurationSpace& space, int N, const AnnealConfig& cfg,
                                       std::uint64_t seed);
/// Independent chains, one per seed, sorted by (action, seed).
std::vector<AnnealResult> minimize_many(const ConfigurationSpace& space, int N, const AnnealConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds, int threads);

/// Sorted pairwise angles of unit vectors.
std::vector<double> pairwise_angles(const std::vector<Vec>& pts);

int default_threads();

}  // namespace cfs
