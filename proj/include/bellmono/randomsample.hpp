#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellmono/qstate.hpp"

namespace bellmono::sampling {

using qstate::RandomEnsemble;

struct HistogramBin {
    double lo = 0.0, hi = 0.0;
    std::uint64_t count = 0;
};

// Streaming statistics for B_s^2 values on [0, bound]: Welford mean and
// variance, a uniform histogram, and exact tail counters. Merging follows
// Chan et al., so a fixed merge order gives reproducible results.
class SampleAccumulator {
public:
    SampleAccumulator(double bound, int n_bins, std::span<const double> tail_ratios);

    void add(double value);
    void merge(const SampleAccumulator& other);

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    // Unbiased (n - 1) variance; zero for fewer than two samples.
    double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }
    double bound() const noexcept { return bound_; }
    const std::vector<std::uint64_t>& bins() const noexcept { return bins_; }
    const std::vector<double>& tail_ratios() const noexcept { return tail_ratios_; }
    const std::vector<std::uint64_t>& tail_counts() const noexcept { return tail_counts_; }

private:
    double bound_;
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_;
    double max_;
    std::vector<std::uint64_t> bins_;
    std::vector<double> tail_ratios_;
    std::vector<std::uint64_t> tail_counts_;
};

inline constexpr double kBoundTolerance = 1e-9;

struct SampleStats {
    int n_qubits = 0;
    RandomEnsemble ensemble;
    std::uint64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double min = 0.0, max = 0.0;
    std::vector<HistogramBin> histogram;
    double bound = 0.0;  // 4 (n - 1)
    std::vector<std::pair<double, std::uint64_t>> tail_counts;  // (threshold ratio, count)

    double stddev() const;
};

SampleStats to_stats(const SampleAccumulator& acc, int n_qubits, const RandomEnsemble& ensemble);

struct SamplingOptions {
    int n_bins = 100;
    int workers = 1;
    std::vector<double> tail_ratios{0.5, 0.75, 0.9, 0.95, 0.99, 1.0};
    // Sample counts at which to record the running mean.
    std::vector<std::uint64_t> checkpoints;
};

struct SamplingRun {
    SampleStats stats;
    std::vector<std::pair<std::uint64_t, double>> checkpoint_means;
};

// B_s^2 with qubit 0 as pivot, evaluated on a fresh random state.
double sample_bs2(int n_qubits, const RandomEnsemble& ensemble, std::uint64_t sample_index);

// Samples indices 0..n_samples-1. Any B_s^2 above 4(n-1) + 1e-9 aborts with
// a DomainError naming the sample. Output is independent of `workers`.
SamplingRun run_sampling(int n_qubits, std::uint64_t n_samples, const RandomEnsemble& ensemble,
                         const SamplingOptions& options = {});

// Fraction of samples with B_s^2 >= ratio * bound - 1e-9, read from the
// exact tail counters. The ratio must be one of the tracked ones.
double saturation_fraction(const SampleStats& stats, double threshold_ratio);

struct ConvergenceTable {
    RandomEnsemble ensemble;
    std::vector<int> n_qubits;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::vector<double>> means;  // [checkpoint][n]
};

ConvergenceTable convergence_table(std::span<const int> n_qubits_list, std::span<const std::uint64_t> checkpoints,
                                   const RandomEnsemble& ensemble, int workers = 1);

}  // namespace bellmono::sampling
