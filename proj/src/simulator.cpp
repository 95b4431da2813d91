#include "pushsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pushsim/numeric.hpp"
#include "pushsim/recursions.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pushsim {

const char* sampler_name(Sampler s) {
    switch (s) {
        case Sampler::Direct: return "direct";
        case Sampler::Batch: return "batch";
        case Sampler::BatchReference: return "batch-reference";
    }
    return "unknown";
}

Sampler sampler_from_name(const std::string& name) {
    if (name == "direct") return Sampler::Direct;
    if (name == "batch") return Sampler::Batch;
    if (name == "batch-reference") return Sampler::BatchReference;
    throw std::invalid_argument("unknown sampler: " + name);
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
    for (const auto& [k, c] : other.counts) counts[k] += c;
    trials += other.trials;
}

std::int64_t EmpiricalDistribution::min_value() const {
    if (counts.empty()) throw std::logic_error("empty distribution");
    return counts.begin()->first;
}

std::int64_t EmpiricalDistribution::max_value() const {
    if (counts.empty()) throw std::logic_error("empty distribution");
    return counts.rbegin()->first;
}

double EmpiricalDistribution::mean() const {
    long double s = 0;
    for (const auto& [k, c] : counts) s += static_cast<long double>(k) * c;
    return static_cast<double>(s / trials);
}

double EmpiricalDistribution::variance() const {
    if (trials < 2) return 0.0;
    const long double m = mean();
    long double s = 0;
    for (const auto& [k, c] : counts) {
        const long double d = static_cast<long double>(k) - m;
        s += d * d * c;
    }
    return static_cast<double>(s / (trials - 1));
}

double EmpiricalDistribution::central_moment(unsigned k) const {
    const long double m = mean();
    long double s = 0;
    for (const auto& [v, c] : counts) {
        long double d = static_cast<long double>(v) - m;
        long double p = 1;
        for (unsigned i = 0; i < k; ++i) p *= d;
        s += p * c;
    }
    return static_cast<double>(s / trials);
}

double EmpiricalDistribution::survival(std::int64_t k) const {
    std::uint64_t tail = 0;
    for (auto it = counts.lower_bound(k); it != counts.end(); ++it)
        tail += it->second;
    return static_cast<double>(tail) / static_cast<double>(trials);
}

namespace {

void ensure_direct_scratch(SimScratch& scratch, std::uint64_t n) {
    if (scratch.perm.size() != n) {
        scratch.perm.resize(n);
        scratch.pos.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            scratch.perm[i] = i;
            scratch.pos[i] = i;
        }
    }
}

} // namespace

RunRecord simulate_direct(std::uint64_t n, Xoshiro256& rng,
                          bool keep_trajectory, SimScratch& scratch) {
    if (n < 1) throw std::invalid_argument("simulate_direct: n must be >= 1");
    if (n > (std::uint64_t(1) << 31))
        throw std::invalid_argument("simulate_direct: n above 2^31 unsupported");

    RunRecord rec;
    rec.n = n;
    rec.sampler = Sampler::Direct;
    if (keep_trajectory) rec.trajectory.push_back(1);
    if (n == 1) return rec;

    ensure_direct_scratch(scratch, n);
    auto& perm = scratch.perm;
    auto& pos = scratch.pos;

    // Any permutation left over from a previous run is fine: the informed
    // prefix starts as {perm[0]} and the start node is arbitrary.
    std::uint32_t informed = 1;
    std::uint32_t rounds = 0;
    const std::uint32_t nn = static_cast<std::uint32_t>(n);
    while (informed < nn) {
        const std::uint32_t pushers = informed;
        for (std::uint32_t j = 0; j < pushers; ++j) {
            const std::uint32_t u = perm[j];
            std::uint32_t target = static_cast<std::uint32_t>(rng.bounded(n - 1));
            if (target >= u) ++target; // uniform over V \ {u}
            const std::uint32_t tp = pos[target];
            if (tp >= informed) {
                // newly informed: swap into the informed prefix. Slots at
                // or beyond `pushers` never hold a pending pusher, so the
                // round stays simultaneous.
                const std::uint32_t other = perm[informed];
                perm[informed] = target;
                perm[tp] = other;
                pos[target] = informed;
                pos[other] = tp;
                ++informed;
            }
        }
        ++rounds;
        if (keep_trajectory) rec.trajectory.push_back(informed);
    }
    rec.runtime = rounds;
    return rec;
}

RunRecord simulate_batch(std::uint64_t n, Xoshiro256& rng, bool keep_trajectory) {
    if (n < 2) throw std::invalid_argument("simulate_batch: n must be >= 2");

    RunRecord rec;
    rec.n = n;
    rec.sampler = Sampler::Batch;
    if (keep_trajectory) rec.trajectory.push_back(1);

    const std::uint64_t pool = n - 1;
    std::uint64_t collected = 0;
    std::uint64_t batch = 1;
    std::uint32_t rounds = 0;
    while (collected < pool) {
        const std::uint64_t uncollected = pool - collected;
        // Stage 1: how many of the `batch` draws land on uncollected coupons.
        std::uint64_t hits;
        if (uncollected == pool) {
            hits = batch;
        } else {
            const double p =
                static_cast<double>(uncollected) / static_cast<double>(pool);
            std::binomial_distribution<std::int64_t> bin(
                static_cast<std::int64_t>(batch), p);
            hits = static_cast<std::uint64_t>(bin(rng));
        }
        // Stage 2: each hit is iid uniform over the uncollected coupons, so
        // it is new with probability (uncollected - fresh)/uncollected.
        std::uint64_t fresh = 0;
        for (std::uint64_t k = 0; k < hits; ++k) {
            if (rng.bounded(uncollected) >= fresh) ++fresh;
        }
        collected += fresh;
        batch = 1 + collected;
        ++rounds;
        if (keep_trajectory) rec.trajectory.push_back(batch);
    }
    rec.runtime = rounds;
    return rec;
}

RunRecord simulate_batch_reference(std::uint64_t n, Xoshiro256& rng,
                                   bool keep_trajectory, SimScratch& scratch) {
    if (n < 2) throw std::invalid_argument("simulate_batch_reference: n must be >= 2");

    RunRecord rec;
    rec.n = n;
    rec.sampler = Sampler::BatchReference;
    if (keep_trajectory) rec.trajectory.push_back(1);

    const std::uint64_t pool = n - 1;
    if (scratch.stamp.size() != pool) {
        scratch.stamp.assign(pool, 0);
        scratch.stamp_epoch = 0;
    }
    const std::uint64_t epoch = ++scratch.stamp_epoch;

    std::uint64_t collected = 0;
    std::uint64_t batch = 1;
    std::uint32_t rounds = 0;
    while (collected < pool) {
        for (std::uint64_t k = 0; k < batch; ++k) {
            const std::uint64_t coupon = rng.bounded(pool);
            if (scratch.stamp[coupon] != epoch) {
                scratch.stamp[coupon] = epoch;
                ++collected;
            }
        }
        batch = 1 + collected;
        ++rounds;
        if (keep_trajectory) rec.trajectory.push_back(batch);
    }
    rec.runtime = rounds;
    return rec;
}

namespace {

RunRecord run_one(const EnsembleParams& p, std::uint64_t trial,
                  SimScratch& scratch) {
    Xoshiro256 rng = trial_stream(p.master_seed, trial);
    RunRecord rec;
    switch (p.sampler) {
        case Sampler::Direct:
            rec = simulate_direct(p.n, rng, p.keep_trajectories, scratch);
            break;
        case Sampler::Batch:
            rec = simulate_batch(p.n, rng, p.keep_trajectories);
            break;
        case Sampler::BatchReference:
            rec = simulate_batch_reference(p.n, rng, p.keep_trajectories, scratch);
            break;
    }
    rec.master_seed = p.master_seed;
    rec.trial = trial;
    return rec;
}

void check_params(const EnsembleParams& p) {
    if (p.trials < 1) throw std::invalid_argument("run_ensemble: trials must be >= 1");
    if (p.n < 1) throw std::invalid_argument("run_ensemble: n must be >= 1");
    if (p.trials > p.max_cost / std::max<std::uint64_t>(p.n, 1))
        throw std::invalid_argument(
            "run_ensemble: n*trials exceeds the resource guard (max_cost)");
}

} // namespace

EnsembleResult run_ensemble_serial(const EnsembleParams& p) {
    check_params(p);
    EnsembleResult result;
    result.sampler = p.sampler;
    result.master_seed = p.master_seed;
    result.dist.n = p.n;
    if (p.keep_trajectories) result.runs.resize(p.trials);

    SimScratch scratch;
    for (std::uint64_t t = 0; t < p.trials; ++t) {
        RunRecord rec = run_one(p, t, scratch);
        result.dist.add(rec.runtime);
        if (p.keep_trajectories) result.runs[t] = std::move(rec);
    }
    return result;
}

EnsembleResult run_ensemble(const EnsembleParams& p) {
    check_params(p);
    EnsembleResult result;
    result.sampler = p.sampler;
    result.master_seed = p.master_seed;
    result.dist.n = p.n;
    if (p.keep_trajectories) result.runs.resize(p.trials);

#ifdef _OPENMP
#pragma omp parallel
    {
        SimScratch scratch;
        EmpiricalDistribution local;
        local.n = p.n;
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(p.trials); ++t) {
            RunRecord rec = run_one(p, static_cast<std::uint64_t>(t), scratch);
            local.add(rec.runtime);
            if (p.keep_trajectories)
                result.runs[static_cast<std::size_t>(t)] = std::move(rec);
        }
#pragma omp critical
        result.dist.merge(local);
    }
#else
    SimScratch scratch;
    for (std::uint64_t t = 0; t < p.trials; ++t) {
        RunRecord rec = run_one(p, t, scratch);
        result.dist.add(rec.runtime);
        if (p.keep_trajectories) result.runs[t] = std::move(rec);
    }
#endif
    return result;
}

double TrajectoryDeviation::exceed_fraction(double threshold) const {
    if (per_run_sup.empty()) return 0.0;
    std::size_t over = 0;
    for (double d : per_run_sup)
        if (d > threshold) ++over;
    return static_cast<double>(over) / static_cast<double>(per_run_sup.size());
}

TrajectoryDeviation trajectory_deviation(const std::vector<RunRecord>& runs,
                                         std::uint32_t T) {
    TrajectoryDeviation out;
    out.per_run_sup.reserve(runs.size());
    for (const auto& rec : runs) {
        if (rec.trajectory.size() <= T)
            throw std::out_of_range("trajectory_deviation: T beyond a trajectory");
        const double n = static_cast<double>(rec.n);
        double v = static_cast<double>(rec.trajectory[T]) / n;
        double sup = 0.0;
        for (std::size_t t = T; t < rec.trajectory.size(); ++t) {
            const double predicted = v * n;
            sup = std::max(sup,
                           std::abs(static_cast<double>(rec.trajectory[t]) - predicted));
            v = informed_map(v);
        }
        out.per_run_sup.push_back(sup);
    }
    return out;
}

CouponGumbelSampler::CouponGumbelSampler(std::uint64_t n) : n_(n) {
    if (n < 2) throw std::invalid_argument("CouponGumbelSampler: n must be >= 2");
    inv_log_q_.resize(n, 0.0);
    const double pool = static_cast<double>(n - 1);
    for (std::uint64_t i = 2; i < n; ++i) {
        // failure probability of the i-th wait is (i-1)/(n-1)
        inv_log_q_[i] = 1.0 / std::log(static_cast<double>(i - 1) / pool);
    }
}

double CouponGumbelSampler::sample(Xoshiro256& rng) const {
    const double pool = static_cast<double>(n_ - 1);
    CompensatedSum<double> sum;
    // i = 1 waits exactly one draw and has expectation 1; it cancels.
    for (std::uint64_t i = 2; i < n_; ++i) {
        const double u = rng.unit_open();
        const double t = 1.0 + std::floor(std::log(u) * inv_log_q_[i]);
        sum.add(t - pool / static_cast<double>(n_ - i));
    }
    return sum.value() / static_cast<double>(n_);
}

} // namespace pushsim
