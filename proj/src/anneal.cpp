#include "cfs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace cfs {

void AnnealConfig::validate() const {
    if (steps < 0 || !(T0 > 0.0) || !(cooling > 0.0 && cooling <= 1.0) || !(proposal_sigma > 0.0) ||
        polish_rounds < 0)
        fail(ErrorCode::ScheduleInvalid, "annealing schedule out of range");
}

namespace {

// Orthonormal tangent basis at x, built by projecting ambient unit vectors.
std::vector<Vec> tangent_basis(const ConfigurationSpace& space, const Vec& x) {
    std::vector<Vec> basis;
    for (int k = 0; k < x.size() && static_cast<int>(basis.size()) < space.tangent_dim; ++k) {
        Vec u = space.tangent(x, Vec::Unit(x.size(), k));
        for (const Vec& b : basis) u -= u.dot(b) * b;
        if (u.norm() > 1e-6) basis.push_back(u.normalized());
    }
    return basis;
}

std::vector<Vec> pattern_directions(const ConfigurationSpace& space, const Vec& x) {
    const auto basis = tangent_basis(space, x);
    std::vector<Vec> dirs;
    if (basis.size() == 2) {
        for (int k = 0; k < 16; ++k) {
            const double a = kPi * k / 8.0;
            dirs.push_back(std::cos(a) * basis[0] + std::sin(a) * basis[1]);
        }
    } else {
        for (const Vec& b : basis) {
            dirs.push_back(b);
            dirs.push_back(-b);
        }
    }
    return dirs;
}

class Chain {
public:
    Chain(const ConfigurationSpace& space, int N, std::uint64_t seed)
        : space_(space), N_(N), w2_(1.0 / (static_cast<double>(N) * N)), rng_(seed) {
        for (int i = 0; i < N; ++i) pts_.push_back(space.random_point(rng_));
        Lm_.resize(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) Lm_(i, j) = Lm_(j, i) = space.lagrangian(pts_[i], pts_[j]);
        S_ = w2_ * Lm_.sum();
    }

    // Change of the action when point i moves to y; fills row with the new pair values.
    double delta(int i, const Vec& y, Vec& row) const {
        row.resize(N_);
        double d = 0.0;
        for (int j = 0; j < N_; ++j) {
            row[j] = (j == i) ? space_.lagrangian(y, y) : space_.lagrangian(y, pts_[j]);
            d += (j == i ? 1.0 : 2.0) * (row[j] - Lm_(i, j));
        }
        return w2_ * d;
    }

    void accept(int i, const Vec& y, const Vec& row, double d) {
        pts_[i] = y;
        for (int j = 0; j < N_; ++j) Lm_(i, j) = Lm_(j, i) = row[j];
        S_ += d;
    }

    void anneal(const AnnealConfig& cfg, std::vector<double>& traj) {
        std::uniform_int_distribution<int> pick(0, N_ - 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> g;
        double T = cfg.T0;
        best_ = pts_;
        bestS_ = S_;
        Vec row;
        for (int step = 0; step < cfg.steps; ++step) {
            const int i = pick(rng_);
            const double sigma = cfg.proposal_sigma * std::max(1e-3, std::sqrt(T / cfg.T0));
            const Vec u = space_.random_tangent(pts_[i], rng_);
            const Vec y = space_.move(pts_[i], u, sigma * g(rng_));
            const double d = delta(i, y, row);
            if (d <= 0.0 || unif(rng_) < std::exp(-d / T)) accept(i, y, row, d);
            if (S_ < bestS_) {
                bestS_ = S_;
                best_ = pts_;
            }
            T *= cfg.cooling;
            if ((step + 1) % 100 == 0) traj.push_back(bestS_);
        }
        restore_best();
    }

    void polish(const AnnealConfig& cfg) {
        double step = 0.05;
        Vec row;
        for (int round = 0; round < cfg.polish_rounds && step > 1e-12; ++round) {
            bool improved = false;
            for (int i = 0; i < N_; ++i) {
                for (const Vec& dir : pattern_directions(space_, pts_[i])) {
                    const Vec y = space_.move(pts_[i], dir, step);
                    const double d = delta(i, y, row);
                    if (d < -1e-15) {
                        accept(i, y, row, d);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        // recompute from scratch to drop accumulated increments
        for (int i = 0; i < N_; ++i)
            for (int j = i; j < N_; ++j) Lm_(i, j) = Lm_(j, i) = space_.lagrangian(pts_[i], pts_[j]);
        S_ = w2_ * Lm_.sum();
    }

    const std::vector<Vec>& points() const { return pts_; }
    double action() const { return S_; }

private:
    void restore_best() {
        pts_ = best_;
        for (int i = 0; i < N_; ++i)
            for (int j = i; j < N_; ++j) Lm_(i, j) = Lm_(j, i) = space_.lagrangian(pts_[i], pts_[j]);
        S_ = w2_ * Lm_.sum();
    }

    const ConfigurationSpace& space_;
    int N_;
    double w2_;
    std::mt19937_64 rng_;
    std::vector<Vec> pts_, best_;
    Eigen::MatrixXd Lm_;
    double S_ = 0.0, bestS_ = 0.0;
};

}  // namespace

AnnealResult minimize_counting_measure(const ConfigurationSpace& space, int N, const AnnealConfig& cfg,
                                       std::uint64_t seed) {
    if (N < 1) fail(ErrorCode::InvalidArgument, "N must be at least 1");
    cfg.validate();
    Chain chain(space, N, seed);
    AnnealResult r;
    r.seed = seed;
    chain.anneal(cfg, r.trajectory);
    chain.polish(cfg);
    const double after = chain.action();
    r.trajectory.push_back(r.trajectory.empty() ? after : std::min(after, r.trajectory.back()));
    r.measure = counting_measure(chain.points());
    r.action = after;
    return r;
}

std::vector<AnnealResult> minimize_many(const ConfigurationSpace& space, int N, const AnnealConfig& cfg,
                                        const std::vector<std::uint64_t>& seeds, int threads) {
    cfg.validate();
    std::vector<AnnealResult> out(seeds.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t k;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= seeds.size()) return;
                k = next++;
            }
            out[k] = minimize_counting_measure(space, N, cfg, seeds[k]);
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    std::sort(out.begin(), out.end(), [](const AnnealResult& a, const AnnealResult& b) {
        return a.action != b.action ? a.action < b.action : a.seed < b.seed;
    });
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("CFS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

}  // namespace cfs
