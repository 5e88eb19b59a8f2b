#include <bit>
#include <string>

#include "bellmono/error.hpp"
#include "bellmono/spinchain.hpp"

namespace bellmono::spinchain {

SectorBasis::SectorBasis(int n_sites) : n_sites_(n_sites) {
    if (n_sites < kMinSites || n_sites > kMaxSites || n_sites % 2 != 0) {
        throw DomainError("chain_size", "sector basis needs an even site count in [4, 24], got " +
                                            std::to_string(n_sites));
    }
    half_ = n_sites / 2;
    lo_mask_ = (std::uint32_t{1} << half_) - 1;
    const int up = n_sites / 2;

    // Gosper's hack walks all patterns with `up` set bits in ascending order.
    std::uint32_t s = (std::uint32_t{1} << up) - 1;
    const std::uint32_t limit = std::uint32_t{1} << n_sites;
    while (s < limit) {
        states_.push_back(s);
        const std::uint32_t c = s & (~s + 1);
        const std::uint32_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }

    // Low-half rank among patterns of equal popcount.
    lo_rank_.assign(std::size_t{1} << half_, 0);
    std::vector<std::uint32_t> seen(half_ + 1, 0);
    for (std::uint32_t lo = 0; lo <= lo_mask_; ++lo) lo_rank_[lo] = seen[std::popcount(lo)]++;

    hi_offset_.assign(std::size_t{1} << (n_sites - half_), 0);
    for (std::size_t k = states_.size(); k-- > 0;) hi_offset_[states_[k] >> half_] = static_cast<std::uint32_t>(k);
}

bool SectorBasis::contains(std::uint32_t pattern) const noexcept {
    return pattern < (std::uint32_t{1} << n_sites_) && std::popcount(pattern) == n_sites_ / 2;
}

SectorBasis enumerate_sector(int n_sites) { return SectorBasis(n_sites); }

}  // namespace bellmono::spinchain
