#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bellmono/error.hpp"
#include "bellmono/spinchain.hpp"

namespace bellmono::spinchain {

double SweepResult::max_bs() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) m = std::max(m, p.bs);
    return m;
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
    if (count < 1 || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo || (count == 1 && hi != lo)) {
        throw DomainError("grid", "grid needs finite lo <= hi and count >= 1 (count 1 only when lo == hi)");
    }
    std::vector<double> g(count);
    for (int k = 0; k < count; ++k) {
        g[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    return g;
}

std::vector<double> finite_difference(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("dimension", "grid and values differ in length");
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d.front() = (y[1] - y[0]) / (x[1] - x[0]);
    d.back() = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (x[k + 1] - x[k - 1]);
    return d;
}

SweepResult sweep(int n_sites, std::span<const double> grid, const SweepOptions& options) {
    if (grid.empty()) throw DomainError("grid", "empty grid");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(grid[k])) throw DomainError("grid", "non-finite grid value");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw DomainError("grid", "grid must be strictly ascending");
    }
    const SectorBasis basis(n_sites);
    SweepResult result;
    result.n_sites = n_sites;

    std::vector<double> previous;
    for (const double ratio : grid) {
        SweepPoint p;
        p.ratio = ratio;
        const ChainSpec spec{n_sites, 1.0, ratio};
        const bool warm = options.warm_start && !previous.empty();
        GroundState gs = ground_state(spec, basis, options.solver, warm ? std::span<const double>(previous)
                                                                         : std::span<const double>());
        p.energy = gs.energy;
        p.residual = gs.residual;
        p.flags = gs.flags();
        p.ok = gs.converged;
        chsh::BellValue bell12, bell23;
        try {
            bell12 = pair_bell(gs, basis, 0, 1);
            bell23 = pair_bell(gs, basis, 1, 2);
        } catch (const DomainError& e) {
            // Keep the sweep going; the point is flagged.
            bell12 = chsh::heisenberg_bell(correlator(gs, basis, PauliAxis::Z, 0, 1));
            bell23 = chsh::heisenberg_bell(correlator(gs, basis, PauliAxis::Z, 1, 2));
            p.flags += p.flags.empty() ? "" : ";";
            p.flags += e.invariant();
            p.ok = false;
        }
        p.b12 = bell12.value;
        p.b23 = bell23.value;
        p.bs = bell12.squared() + bell23.squared();
        if (options.observer) options.observer(gs, basis, p);
        previous = std::move(gs.vector);
        result.points.push_back(std::move(p));
    }

    std::vector<double> x, b12, b23;
    for (const auto& p : result.points) {
        x.push_back(p.ratio);
        b12.push_back(p.b12);
        b23.push_back(p.b23);
    }
    const auto d12 = finite_difference(x, b12);
    const auto d23 = finite_difference(x, b23);
    for (std::size_t k = 0; k < result.points.size(); ++k) {
        result.points[k].db12 = d12[k];
        result.points[k].db23 = d23[k];
    }
    return result;
}

}  // namespace bellmono::spinchain
