#include "bellmono/randomsample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include "bellmono/chsh.hpp"
#include "bellmono/error.hpp"

namespace bellmono::sampling {

namespace {
constexpr std::uint64_t kChunkSize = 4096;
}

SampleAccumulator::SampleAccumulator(double bound, int n_bins, std::span<const double> tail_ratios)
    : bound_(bound),
      min_(std::numeric_limits<double>::infinity()),
      max_(-std::numeric_limits<double>::infinity()),
      bins_(static_cast<std::size_t>(n_bins), 0),
      tail_ratios_(tail_ratios.begin(), tail_ratios.end()),
      tail_counts_(tail_ratios.size(), 0) {
    if (!(bound > 0.0)) throw DomainError("histogram_bound", "bound must be positive");
    if (n_bins < 1) throw DomainError("histogram_bins", "need at least one bin");
}

void SampleAccumulator::add(double value) {
    ++count_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (value - mean_);
    min_ = std::min(min_, value);
    max_ = std::max(max_, value);

    const auto n_bins = static_cast<std::int64_t>(bins_.size());
    auto bin = static_cast<std::int64_t>(std::floor(value / bound_ * static_cast<double>(n_bins)));
    bins_[static_cast<std::size_t>(std::clamp<std::int64_t>(bin, 0, n_bins - 1))]++;

    for (std::size_t k = 0; k < tail_ratios_.size(); ++k) {
        if (value >= tail_ratios_[k] * bound_ - kBoundTolerance) ++tail_counts_[k];
    }
}

void SampleAccumulator::merge(const SampleAccumulator& other) {
    if (other.bins_.size() != bins_.size() || other.tail_ratios_ != tail_ratios_ || other.bound_ != bound_) {
        throw DomainError("accumulator_merge", "incompatible accumulators");
    }
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
    for (std::size_t k = 0; k < bins_.size(); ++k) bins_[k] += other.bins_[k];
    for (std::size_t k = 0; k < tail_counts_.size(); ++k) tail_counts_[k] += other.tail_counts_[k];
}

double SampleStats::stddev() const { return std::sqrt(variance); }

SampleStats to_stats(const SampleAccumulator& acc, int n_qubits, const RandomEnsemble& ensemble) {
    SampleStats s;
    s.n_qubits = n_qubits;
    s.ensemble = ensemble;
    s.count = acc.count();
    s.mean = acc.mean();
    s.variance = acc.variance();
    s.min = acc.min();
    s.max = acc.max();
    s.bound = acc.bound();
    const auto n_bins = acc.bins().size();
    for (std::size_t k = 0; k < n_bins; ++k) {
        s.histogram.push_back({acc.bound() * static_cast<double>(k) / static_cast<double>(n_bins),
                               acc.bound() * static_cast<double>(k + 1) / static_cast<double>(n_bins),
                               acc.bins()[k]});
    }
    for (std::size_t k = 0; k < acc.tail_ratios().size(); ++k) {
        s.tail_counts.emplace_back(acc.tail_ratios()[k], acc.tail_counts()[k]);
    }
    return s;
}

double sample_bs2(int n_qubits, const RandomEnsemble& ensemble, std::uint64_t sample_index) {
    const auto state = qstate::random_pure_state(n_qubits, ensemble, sample_index);
    return chsh::bell_sum(state, 0).sum;
}

SamplingRun run_sampling(int n_qubits, std::uint64_t n_samples, const RandomEnsemble& ensemble,
                         const SamplingOptions& options) {
    if (n_qubits < 3 || n_qubits > 8) throw DomainError("qubit_count", "sampling supports 3 <= n <= 8");
    if (n_samples < 1) throw DomainError("sample_count", "need at least one sample");
    if (options.n_bins < 10) throw DomainError("histogram_bins", "need at least 10 bins");
    if (options.workers < 1) throw DomainError("workers", "need at least one worker");
    for (std::size_t k = 1; k < options.checkpoints.size(); ++k) {
        if (options.checkpoints[k] <= options.checkpoints[k - 1]) {
            throw DomainError("checkpoints", "checkpoints must be strictly ascending");
        }
    }
    for (const double r : options.tail_ratios) {
        if (!(r > 0.0) || r > 1.0) throw DomainError("threshold_ratio", "tail ratios must lie in (0, 1]");
    }

    const double bound = 4.0 * (n_qubits - 1);

    // Chunk boundaries depend only on n_samples and the checkpoints.
    std::set<std::uint64_t> cuts{0, n_samples};
    for (std::uint64_t c = kChunkSize; c < n_samples; c += kChunkSize) cuts.insert(c);
    for (const auto c : options.checkpoints) {
        if (c > 0 && c < n_samples) cuts.insert(c);
    }
    const std::vector<std::uint64_t> edges(cuts.begin(), cuts.end());
    const auto n_chunks = static_cast<std::int64_t>(edges.size() - 1);

    std::vector<SampleAccumulator> partial(static_cast<std::size_t>(n_chunks),
                                           SampleAccumulator(bound, options.n_bins, options.tail_ratios));
    std::vector<std::optional<std::pair<std::uint64_t, double>>> violations(static_cast<std::size_t>(n_chunks));
    std::vector<std::string> failures(static_cast<std::size_t>(n_chunks));

#pragma omp parallel for num_threads(options.workers) schedule(dynamic, 1)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        try {
            SampleAccumulator& acc = partial[c];
            for (std::uint64_t idx = edges[c]; idx < edges[c + 1]; ++idx) {
                const double v = sample_bs2(n_qubits, ensemble, idx);
                if (!(v <= bound + kBoundTolerance)) {
                    violations[c] = {idx, v};
                    break;
                }
                acc.add(v);
            }
        } catch (const std::exception& e) {
            failures[c] = e.what();
        }
    }

    for (std::int64_t c = 0; c < n_chunks; ++c) {
        if (violations[c]) {
            throw DomainError("n_party_monogamy",
                              "sample " + std::to_string(violations[c]->first) + " (n=" + std::to_string(n_qubits) +
                                  ", ensemble=" + std::string(qstate::to_string(ensemble.kind)) + ", seed=" +
                                  std::to_string(ensemble.seed) + ") has B_s^2 = " +
                                  std::to_string(violations[c]->second) + " > " + std::to_string(bound));
        }
        if (!failures[c].empty()) throw DomainError("sampling", failures[c]);
    }

    SamplingRun run{.stats = {}, .checkpoint_means = {}};
    SampleAccumulator total(bound, options.n_bins, options.tail_ratios);
    std::size_t next_checkpoint = 0;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        total.merge(partial[c]);
        while (next_checkpoint < options.checkpoints.size() &&
               options.checkpoints[next_checkpoint] <= total.count()) {
            if (options.checkpoints[next_checkpoint] == total.count()) {
                run.checkpoint_means.emplace_back(total.count(), total.mean());
            }
            ++next_checkpoint;
        }
    }
    run.stats = to_stats(total, n_qubits, ensemble);
    return run;
}

double saturation_fraction(const SampleStats& stats, double threshold_ratio) {
    if (!(threshold_ratio > 0.0) || threshold_ratio > 1.0) {
        throw DomainError("threshold_ratio", "threshold ratio must lie in (0, 1]");
    }
    if (stats.count == 0) return 0.0;
    for (const auto& [ratio, count] : stats.tail_counts) {
        if (std::abs(ratio - threshold_ratio) < 1e-12) {
            return static_cast<double>(count) / static_cast<double>(stats.count);
        }
    }
    throw DomainError("threshold_ratio", "ratio " + std::to_string(threshold_ratio) + " was not tracked during sampling");
}

ConvergenceTable convergence_table(std::span<const int> n_qubits_list, std::span<const std::uint64_t> checkpoints,
                                   const RandomEnsemble& ensemble, int workers) {
    if (checkpoints.empty()) throw DomainError("checkpoints", "need at least one checkpoint");
    ConvergenceTable table;
    table.ensemble = ensemble;
    table.n_qubits.assign(n_qubits_list.begin(), n_qubits_list.end());
    table.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    table.means.assign(checkpoints.size(), std::vector<double>(n_qubits_list.size(), 0.0));

    SamplingOptions options;
    options.workers = workers;
    options.checkpoints = table.checkpoints;
    for (std::size_t col = 0; col < n_qubits_list.size(); ++col) {
        const SamplingRun run = run_sampling(n_qubits_list[col], checkpoints.back(), ensemble, options);
        for (std::size_t row = 0; row < run.checkpoint_means.size(); ++row) {
            table.means[row][col] = run.checkpoint_means[row].second;
        }
    }
    return table;
}

}  // namespace bellmono::sampling
