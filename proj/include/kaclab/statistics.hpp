#pragma once

#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaclab/rng.hpp"

namespace kaclab {

enum class EstimateMethod { uniform_weighted, self_sampled, exact_reduction, closed_form };

std::string method_name(EstimateMethod m);

/// Result of a Monte Carlo or quadrature evaluation of a mean. `ess` is the
/// effective sample size; below 100 the estimate is flagged unreliable but is
/// still returned.
struct EntropyEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 1;
    EstimateMethod method = EstimateMethod::uniform_weighted;
    double ess = 0.0;

    bool reliable() const { return ess >= 100.0; }
};

/// Welford streaming mean/variance accumulator with deterministic pairwise
/// merge, so sharded accumulation folds in a fixed order.
struct RunningStats {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningStats& o);
    double variance() const;
    double std_error_of_mean() const;
};

/// Mean of integrand(sampler(stream)) over n independent draws. Sample j
/// always uses stream (master_seed, j), so the estimate is bit-identical for
/// fixed (n, shards, master_seed) and shard-count independent to roundoff.
template <class Integrand, class Sampler>
EntropyEstimate estimate_mean(Integrand&& integrand, Sampler&& sampler, std::int64_t n,
                              int shards, std::uint64_t master_seed,
                              EstimateMethod method = EstimateMethod::uniform_weighted) {
    if (n < 2) throw std::invalid_argument("estimate_mean: need n >= 2");
    if (shards < 1 || n % shards != 0)
        throw std::invalid_argument("estimate_mean: n must be divisible by shards");

    auto run_shard = [&](std::int64_t lo, std::int64_t hi) {
        RunningStats acc;
        for (std::int64_t j = lo; j < hi; ++j) {
            RngStream stream(master_seed, static_cast<std::uint64_t>(j));
            double x = integrand(sampler(stream));
            if (!std::isfinite(x))
                throw std::runtime_error(
                    "estimate_mean: non-finite integrand value at stream index " +
                    std::to_string(j) + ", draw counter " +
                    std::to_string(stream.draw_counter()));
            acc.add(x);
        }
        return acc;
    };

    std::int64_t per_shard = n / shards;
    std::vector<std::future<RunningStats>> futures;
    futures.reserve(static_cast<std::size_t>(shards) - 1);
    for (int s = 1; s < shards; ++s)
        futures.push_back(std::async(std::launch::async, run_shard, s * per_shard,
                                     (s + 1) * per_shard));
    RunningStats total = run_shard(0, per_shard);
    for (auto& f : futures) total.merge(f.get());

    EntropyEstimate est;
    est.value = total.mean;
    est.std_error = total.std_error_of_mean();
    est.n_samples = n;
    est.method = method;
    est.ess = static_cast<double>(n);
    return est;
}

}  // namespace kaclab
