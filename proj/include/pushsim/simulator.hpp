#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushsim/rng.hpp"

namespace pushsim {

enum class Sampler { Direct, Batch, BatchReference };

const char* sampler_name(Sampler s);
Sampler sampler_from_name(const std::string& name);

/// One simulated run of push on K_n.
struct RunRecord {
    std::uint64_t n = 0;
    std::uint32_t runtime = 0; // rounds until everyone is informed
    Sampler sampler = Sampler::Direct;
    std::uint64_t master_seed = 0;
    std::uint64_t trial = 0;
    /// informed counts |I_t| for t = 0..runtime; empty unless requested
    std::vector<std::uint64_t> trajectory;
};

/// Integer histogram of runtimes over an ensemble.
struct EmpiricalDistribution {
    std::uint64_t n = 0;
    std::uint64_t trials = 0;
    std::map<std::int64_t, std::uint64_t> counts;

    void add(std::int64_t runtime) {
        ++counts[runtime];
        ++trials;
    }
    void merge(const EmpiricalDistribution& other);

    std::int64_t min_value() const;
    std::int64_t max_value() const;
    double mean() const;
    double variance() const;
    /// k-th central sample moment.
    double central_moment(unsigned k) const;
    /// Exact P[X >= k] from integer counts.
    double survival(std::int64_t k) const;
};

/// Reusable per-thread buffers so ensembles do not reallocate O(n) arrays
/// per trial.
struct SimScratch {
    std::vector<std::uint32_t> perm;  // node ids, informed prefix first
    std::vector<std::uint32_t> pos;   // pos[node] = index in perm
    std::vector<std::uint64_t> stamp; // coupon collection marks
    std::uint64_t stamp_epoch = 0;
};

/// Faithful round-by-round protocol: every informed node pushes to a
/// uniform neighbour in V \ {self}; pushes within a round are simultaneous.
/// n = 1 returns runtime 0.
RunRecord simulate_direct(std::uint64_t n, Xoshiro256& rng,
                          bool keep_trajectory, SimScratch& scratch);

/// Coupon-collector batch model: a pool of n-1 coupons, each round draws a
/// batch of d = (1 + distinct collected) uniform coupons with replacement
/// and updates the distinct count. Runtime is the number of batches until
/// all coupons are seen; the law is identical to simulate_direct.
///
/// The batch is sampled in two exact stages instead of d individual array
/// probes: W ~ Binomial(d, u/(n-1)) draws land on the u uncollected
/// coupons, and of those each is new with probability (u-c)/u given c new
/// ones so far in the round. The round transition law is unchanged; the
/// cost drops from O(sum |I_t|) to O(n) per run.
RunRecord simulate_batch(std::uint64_t n, Xoshiro256& rng, bool keep_trajectory);

/// Literal draw-by-draw batch sampler (one bounded draw per coupon, stamped
/// distinct counting). Kept as the reference implementation for
/// equivalence tests and benchmarks.
RunRecord simulate_batch_reference(std::uint64_t n, Xoshiro256& rng,
                                   bool keep_trajectory, SimScratch& scratch);

struct EnsembleParams {
    std::uint64_t n = 2;
    std::uint64_t trials = 1;
    Sampler sampler = Sampler::Batch;
    std::uint64_t master_seed = 0;
    bool keep_trajectories = false;
    /// guard against accidental huge jobs: requires n * trials <= max_cost
    std::uint64_t max_cost = std::uint64_t(1) << 41;
};

struct EnsembleResult {
    EmpiricalDistribution dist;
    Sampler sampler = Sampler::Batch;
    std::uint64_t master_seed = 0;
    std::vector<RunRecord> runs; // only when keep_trajectories
};

/// Trial i runs on the stream trial_stream(master_seed, i); the result is
/// independent of execution order and thread count. OpenMP-parallel.
EnsembleResult run_ensemble(const EnsembleParams& params);

/// Sequential reference with bit-identical results.
EnsembleResult run_ensemble_serial(const EnsembleParams& params);

/// Per-run sup_t | |I_{T+t}| - F^(t)(|I_T|/n) n | over the retained
/// trajectories, plus the fraction exceeding a threshold.
struct TrajectoryDeviation {
    std::vector<double> per_run_sup;
    double exceed_fraction(double threshold) const;
};

TrajectoryDeviation trajectory_deviation(const std::vector<RunRecord>& runs,
                                         std::uint32_t T);

/// Sum of centred geometric waiting times, n^{-1} sum_{i<n} (T_i - E T_i)
/// with T_i ~ Geo((n-i)/(n-1)). Converges to Gumbel(euler_gamma).
class CouponGumbelSampler {
public:
    explicit CouponGumbelSampler(std::uint64_t n);
    double sample(Xoshiro256& rng) const;
    std::uint64_t n() const { return n_; }

private:
    std::uint64_t n_;
    std::vector<double> inv_log_q_; // 1/ln(1-p_i), index i in [2, n-1]
};

} // namespace pushsim
