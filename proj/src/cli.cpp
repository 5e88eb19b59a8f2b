#include "bellmono/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bellmono/chsh.hpp"
#include "bellmono/error.hpp"

namespace bellmono::cli {

namespace {

struct HelpRequested {
    std::string text;
};

// The six sample counts listed in the published convergence table.
constexpr std::uint64_t kTableRows[] = {100, 1000, 100000, 1000000, 25000000, 50000000};

int default_workers() {
    if (const char* env = std::getenv("BELLMONO_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
        throw UsageError("BELLMONO_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    }
    return 1;
}

void emit(const RunConfig& config, std::ostream& out, const std::string& contents) {
    if (config.out) {
        write_atomic(*config.out, contents);
    } else {
        out << contents;
    }
}

nlohmann::json rounded(const nlohmann::json& j) {
    if (j.is_number_float()) return round12(j.get<double>());
    if (j.is_array() || j.is_object()) {
        nlohmann::json copy = j;
        for (auto& item : copy) item = rounded(item);
        return copy;
    }
    return j;
}

std::string dump(const nlohmann::json& j) { return rounded(j).dump(2) + "\n"; }

std::vector<std::uint64_t> table_checkpoints(std::uint64_t samples) {
    std::vector<std::uint64_t> cps;
    for (const auto r : kTableRows) {
        if (r < samples) cps.push_back(r);
    }
    cps.push_back(samples);
    return cps;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    // Avoid "-0" in diffs.
    if (std::string_view(buf) == "-0") return "0";
    return buf;
}

double round12(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format_number(x).c_str(), nullptr);
}

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
    if (second == std::string::npos) throw UsageError("--grid: expected lo:hi:count, got '" + text + "'");
    try {
        std::size_t pos = 0;
        const std::string lo = text.substr(0, first);
        const std::string hi = text.substr(first + 1, second - first - 1);
        const std::string count = text.substr(second + 1);
        g.lo = std::stod(lo, &pos);
        if (pos != lo.size()) throw std::invalid_argument(lo);
        g.hi = std::stod(hi, &pos);
        if (pos != hi.size()) throw std::invalid_argument(hi);
        g.count = std::stoi(count, &pos);
        if (pos != count.size()) throw std::invalid_argument(count);
    } catch (const std::logic_error&) {
        throw UsageError("--grid: expected lo:hi:count, got '" + text + "'");
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.hi < g.lo || g.count < 1 ||
        (g.count == 1 && g.lo != g.hi)) {
        throw UsageError("--grid: need finite lo <= hi and count >= 1, got '" + text + "'");
    }
    return g;
}

std::pair<int, int> parse_pair(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("--pair: expected i,j, got '" + text + "'");
    try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
        const int i = std::stoi(a, &p1);
        const int j = std::stoi(b, &p2);
        if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument(text);
        return {i - 1, j - 1};
    } catch (const std::logic_error&) {
        throw UsageError("--pair: expected i,j, got '" + text + "'");
    }
}

RunConfig parse_args(const std::vector<std::string>& args) {
    RunConfig c;
    c.workers = default_workers();

    CLI::App app{"Bell-correlation monogamy toolkit"};
    app.require_subcommand(1);
    std::string grid_text = "-1:3:161", pair_text = "1,2", method_text = "auto";
    std::string out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workers", c.workers, "Worker threads (default: BELLMONO_WORKERS or 1)");
        sub->add_option("--out", out, "Output path (prefix for `random`)");
    };

    auto* sweep = app.add_subcommand("sweep", "Bell correlations of the dimerized ring over J2/J1");
    sweep->add_option("--n", c.n, "Number of sites")->required();
    sweep->add_option("--grid", grid_text, "lo:hi:count");
    sweep->add_option("--tol", c.tol, "Relative eigenvalue tolerance");
    sweep->add_option("--method", method_text, "auto|power|lanczos");
    add_common(sweep);

    auto* bell = app.add_subcommand("bell", "Maximal CHSH value of a pair");
    bell->add_option("--state", c.state_file, "Two-qubit state JSON file");
    bell->add_option("--n", c.n, "Number of sites");
    bell->add_option("--j2", c.j2, "J2/J1 (J1 = 1)");
    bell->add_option("--pair", pair_text, "i,j (1-based)");
    bell->add_option("--tol", c.tol, "Relative eigenvalue tolerance");
    bell->add_option("--method", method_text, "auto|power|lanczos");
    add_common(bell);

    auto* random = app.add_subcommand("random", "B_s^2 statistics over random pure states");
    random->add_option("--n", c.n, "Number of qubits")->required();
    random->add_option("--samples", c.samples, "Number of states")->required();
    random->add_option("--ensemble", c.ensemble, "complex|real");
    random->add_option("--seed", c.seed, "64-bit seed");
    random->add_option("--bins", c.bins, "Histogram bins");
    add_common(random);

    auto* table1 = app.add_subcommand("table1", "Running mean of B_s^2 at fixed checkpoints");
    table1->add_option("--samples", c.samples, "Largest sample count")->required();
    table1->add_option("--ensemble", c.ensemble, "complex|real|both");
    table1->add_option("--seed", c.seed, "64-bit seed");
    table1->add_option("--qubits", c.n_list, "Qubit counts")->delimiter(',');
    add_common(table1);

    auto* oracle = app.add_subcommand("oracle", "Direction-search maximum of a pair state");
    oracle->add_option("--state", c.state_file, "Two-qubit state JSON file")->required();
    oracle->add_option("--restarts", c.restarts, "Random restarts");
    oracle->add_option("--tol", c.oracle_tol, "Convergence tolerance");
    oracle->add_option("--seed", c.seed, "Restart seed");
    add_common(oracle);

    auto* verify = app.add_subcommand("verify", "Cross-module property suite");
    verify->add_flag("--quick", c.quick, "Reduced sample sizes");
    add_common(verify);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (!out.empty()) c.out = out;
    if (c.workers < 1) throw UsageError("--workers must be >= 1");

    auto check_chain = [&](const char* cmd) {
        if (c.n < spinchain::kMinSites || c.n > spinchain::kMaxSites || c.n % 2 != 0) {
            throw UsageError(std::string(cmd) + " --n: need an even site count in [4, 24]");
        }
        if (!(c.tol > 0.0)) throw UsageError(std::string(cmd) + " --tol must be positive");
        try {
            c.method = spinchain::parse_solver_method(method_text);
        } catch (const DomainError&) {
            throw UsageError(std::string(cmd) + " --method: expected auto, power or lanczos");
        }
    };

    if (sweep->parsed()) {
        c.command = Command::Sweep;
        c.grid = parse_grid(grid_text);
        check_chain("sweep");
    } else if (bell->parsed()) {
        c.command = Command::Bell;
        if (c.state_file && c.n != 0) throw UsageError("bell: give either --state or --n, not both");
        if (!c.state_file) {
            check_chain("bell");
            if (!std::isfinite(c.j2)) throw UsageError("bell --j2 must be finite");
            c.pair = parse_pair(pair_text);
            if (c.pair.first < 0 || c.pair.first >= c.n || c.pair.second < 0 || c.pair.second >= c.n ||
                c.pair.first == c.pair.second) {
                throw UsageError("bell --pair: need two distinct sites in 1.." + std::to_string(c.n));
            }
        }
    } else if (random->parsed()) {
        c.command = Command::Random;
        if (c.n < 3 || c.n > 8) throw UsageError("random --n: need 3 <= n <= 8");
        if (c.samples < 1) throw UsageError("random --samples must be >= 1");
        if (c.bins < 10) throw UsageError("random --bins must be >= 10");
        if (c.ensemble != "complex" && c.ensemble != "real") throw UsageError("random --ensemble: complex or real");
    } else if (table1->parsed()) {
        c.command = Command::Table1;
        if (c.samples < 1) throw UsageError("table1 --samples must be >= 1");
        if (c.ensemble != "complex" && c.ensemble != "real" && c.ensemble != "both") {
            throw UsageError("table1 --ensemble: complex, real or both");
        }
        if (c.n_list.empty()) throw UsageError("table1 --qubits: need at least one value");
        for (const int n : c.n_list) {
            if (n < 3 || n > 8) throw UsageError("table1 --qubits: values must lie in [3, 8]");
        }
    } else if (oracle->parsed()) {
        c.command = Command::Oracle;
        if (c.restarts < 1) throw UsageError("oracle --restarts must be >= 1");
        if (!(c.oracle_tol > 0.0)) throw UsageError("oracle --tol must be positive");
    } else {
        c.command = Command::Verify;
    }
    return c;
}

// ---------------------------------------------------------------------------

std::string sweep_csv(const spinchain::SweepResult& result) {
    std::ostringstream os;
    os << "j2_over_j1,B12,B23,dB12,dB23,Bs2,energy,residual,flags\n";
    for (const auto& p : result.points) {
        os << format_number(p.ratio) << ',' << format_number(p.b12) << ',' << format_number(p.b23) << ','
           << format_number(p.db12) << ',' << format_number(p.db23) << ',' << format_number(p.bs) << ','
           << format_number(p.energy) << ',' << format_number(p.residual) << ',' << p.flags << '\n';
    }
    return os.str();
}

std::string histogram_csv(const sampling::SampleStats& stats) {
    std::ostringstream os;
    os << "bin_lo,bin_hi,count,frequency\n";
    for (const auto& b : stats.histogram) {
        const double freq = stats.count ? static_cast<double>(b.count) / static_cast<double>(stats.count) : 0.0;
        os << format_number(b.lo) << ',' << format_number(b.hi) << ',' << b.count << ',' << format_number(freq)
           << '\n';
    }
    return os.str();
}

nlohmann::json sampling_summary(const sampling::SampleStats& stats) {
    nlohmann::json j;
    j["n"] = stats.n_qubits;
    j["samples"] = stats.count;
    j["mean"] = stats.mean;
    j["stddev"] = stats.stddev();
    j["bound"] = stats.bound;
    j["saturation_fraction_0.9"] = sampling::saturation_fraction(stats, 0.9);
    j["ensemble"] = std::string(qstate::to_string(stats.ensemble.kind));
    j["seed"] = stats.ensemble.seed;
    return j;
}

std::string table_csv(const std::vector<sampling::ConvergenceTable>& tables) {
    std::ostringstream os;
    if (tables.empty()) return {};
    os << "ensemble,states";
    for (const int n : tables.front().n_qubits) os << ",N=" << n;
    os << '\n';
    for (const auto& t : tables) {
        for (std::size_t row = 0; row < t.checkpoints.size(); ++row) {
            os << qstate::to_string(t.ensemble.kind) << ',' << t.checkpoints[row];
            for (const double m : t.means[row]) os << ',' << format_number(m);
            os << '\n';
        }
    }
    return os.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DomainError("output", "cannot open '" + tmp + "' for writing");
        f << contents;
        f.flush();
        if (!f) throw DomainError("output", "write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DomainError("output", "cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> verify_suite(bool quick, int workers) {
    using namespace bellmono::chsh;
    std::vector<CheckResult> results;
    auto record = [&](std::string name, auto&& body) {
        CheckResult r;
        r.name = std::move(name);
        try {
            r.detail = body();
            r.passed = r.detail.empty();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = e.what();
        }
        results.push_back(std::move(r));
    };

    record("oracle_equivalence", [&]() -> std::string {
        const int count = quick ? 20 : 100;
        for (int k = 0; k < count; ++k) {
            const auto t = qstate::correlation_matrix(qstate::random_mixed_pair_state(7, k));
            const double h = horodecki_max(t).value;
            const double o = oracle_max(t, {.seed = static_cast<std::uint64_t>(k)}).value;
            if (std::abs(h - o) > 1e-5) return "state " + std::to_string(k) + ": " + format_number(h) + " vs " + format_number(o);
        }
        const auto singlet = qstate::correlation_matrix(qstate::TwoQubitState::singlet());
        if (std::abs(horodecki_max(singlet).value - kTsirelson) > 1e-6 ||
            std::abs(oracle_max(singlet).value - kTsirelson) > 1e-6) {
            return "singlet does not reach 2 sqrt(2)";
        }
        return {};
    });

    for (const auto kind : {qstate::EnsembleKind::ComplexHaar, qstate::EnsembleKind::RealOrthogonal}) {
        const std::string tag(qstate::to_string(kind));
        record("tripartite_monogamy_" + tag, [&]() -> std::string {
            const int count = quick ? 2000 : 100000;
            for (int k = 0; k < count; ++k) {
                const auto s = qstate::random_pure_state(3, {kind, 11}, k);
                for (int pivot = 0; pivot < 3; ++pivot) {
                    const auto rep = monogamy_triple(s, pivot);
                    if (!rep.satisfied) return "sample " + std::to_string(k) + " sum " + format_number(rep.sum);
                }
            }
            return {};
        });
        record("n_party_monogamy_" + tag, [&]() -> std::string {
            sampling::SamplingOptions opt;
            opt.workers = workers;
            for (int n = 3; n <= 6; ++n) sampling::run_sampling(n, quick ? 1000 : 100000, {kind, 13}, opt);
            return {};
        });
    }

    record("real_tripartite_real_plane", [&]() -> std::string {
        const int count = quick ? 1000 : 10000;
        for (int k = 0; k < count; ++k) {
            const auto s = qstate::random_pure_state(3, {qstate::EnsembleKind::RealOrthogonal, 17}, k);
            for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
                const auto t = qstate::correlation_matrix(qstate::partial_trace_pair(s, i, j));
                const double closed = real_tripartite_max(s, i, j);
                const double plane = real_plane_max(t).value;
                const double general = horodecki_max(t).value;
                if (std::abs(closed - plane) > 1e-9 || closed > general + 1e-9) {
                    return "sample " + std::to_string(k) + ": " + format_number(closed) + " vs plane " + format_number(plane);
                }
            }
        }
        return {};
    });

    record("solver_reference_ring", [&]() -> std::string {
        const spinchain::SectorBasis basis(4);
        const auto gs = spinchain::ground_state({4, 1.0, 1.0}, basis);
        const double zz = spinchain::correlator(gs, basis, PauliAxis::Z, 0, 1);
        if (std::abs(gs.energy + 8.0) > 1e-8 || std::abs(zz + 2.0 / 3.0) > 1e-8) {
            return "energy " + format_number(gs.energy) + ", zz " + format_number(zz);
        }
        return {};
    });

    record("chain_sweep_monogamy", [&]() -> std::string {
        const auto grid = spinchain::uniform_grid(-1.0, 3.0, quick ? 41 : 161);
        const auto res = spinchain::sweep(8, grid);
        for (const auto& p : res.points) {
            if (p.bs > 8.0 + 1e-9) return "B_s = " + format_number(p.bs) + " at " + format_number(p.ratio);
            if (!p.ok) return "point " + format_number(p.ratio) + " flagged: " + p.flags;
        }
        return {};
    });

    record("translation_invariant_nonviolation", [&]() -> std::string {
        const int n = quick ? 8 : 12;
        const spinchain::SectorBasis basis(n);
        const auto gs = spinchain::ground_state({n, 1.0, 1.0}, basis);
        const auto rep = spinchain::theorem1_scan(gs, basis, true);
        if (!rep.all_within_bound) return "a pair at distance < N/2 exceeds 2";
        return {};
    });

    return results;
}

// ---------------------------------------------------------------------------

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        omp_set_num_threads(config.workers);
        switch (config.command) {
            case Command::Sweep: {
                spinchain::SweepOptions opt;
                opt.solver.tol = config.tol;
                opt.solver.method = config.method;
                const auto grid = spinchain::uniform_grid(config.grid.lo, config.grid.hi, config.grid.count);
                emit(config, out, sweep_csv(spinchain::sweep(config.n, grid, opt)));
                break;
            }
            case Command::Bell: {
                chsh::BellValue v;
                if (config.state_file) {
                    std::ifstream f(*config.state_file);
                    if (!f) throw DomainError("state_file", "cannot read '" + *config.state_file + "'");
                    nlohmann::json j;
                    try {
                        j = nlohmann::json::parse(f);
                    } catch (const nlohmann::json::exception& e) {
                        throw DomainError("state_file", e.what());
                    }
                    v = chsh::horodecki_max(qstate::correlation_matrix(qstate::two_qubit_state_from_json(j)));
                } else {
                    spinchain::SolverOptions opt;
                    opt.tol = config.tol;
                    opt.method = config.method;
                    const spinchain::SectorBasis basis(config.n);
                    const auto gs = spinchain::ground_state({config.n, 1.0, config.j2}, basis, opt);
                    v = spinchain::pair_bell(gs, basis, config.pair.first, config.pair.second);
                }
                emit(config, out, dump(chsh::to_json(v)));
                break;
            }
            case Command::Oracle: {
                std::ifstream f(*config.state_file);
                if (!f) throw DomainError("state_file", "cannot read '" + *config.state_file + "'");
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(f);
                } catch (const nlohmann::json::exception& e) {
                    throw DomainError("state_file", e.what());
                }
                const auto t = qstate::correlation_matrix(qstate::two_qubit_state_from_json(j));
                const auto v = chsh::oracle_max(t, {.restarts = config.restarts, .tol = config.oracle_tol, .seed = config.seed});
                auto report = chsh::to_json(v);
                report["converged"] = v.converged;
                emit(config, out, dump(report));
                break;
            }
            case Command::Random: {
                sampling::SamplingOptions opt;
                opt.n_bins = config.bins;
                opt.workers = config.workers;
                const qstate::RandomEnsemble ens{qstate::parse_ensemble(config.ensemble), config.seed};
                const auto run = sampling::run_sampling(config.n, config.samples, ens, opt);
                const std::string csv = histogram_csv(run.stats);
                const std::string summary = dump(sampling_summary(run.stats));
                if (config.out) {
                    write_atomic(*config.out + "_hist.csv", csv);
                    write_atomic(*config.out + "_summary.json", summary);
                } else {
                    out << csv << summary;
                }
                break;
            }
            case Command::Table1: {
                std::vector<sampling::ConvergenceTable> tables;
                const auto cps = table_checkpoints(config.samples);
                for (const char* name : {"complex", "real"}) {
                    if (config.ensemble != "both" && config.ensemble != name) continue;
                    tables.push_back(sampling::convergence_table(config.n_list, cps,
                                                                 {qstate::parse_ensemble(name), config.seed},
                                                                 config.workers));
                }
                emit(config, out, table_csv(tables));
                break;
            }
            case Command::Verify: {
                const auto checks = verify_suite(config.quick, config.workers);
                nlohmann::json report;
                report["checks"] = nlohmann::json::array();
                report["failures"] = nlohmann::json::array();
                bool all = true;
                for (const auto& c : checks) {
                    report["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
                    if (!c.passed) report["failures"].push_back(c.name);
                    all = all && c.passed;
                }
                report["passed"] = all;
                emit(config, out, dump(report));
                if (!all) {
                    err << "verify: " << report["failures"].size() << " check(s) failed\n";
                    return 1;
                }
                break;
            }
        }
    } catch (const DomainError& e) {
        err << "error [" << e.invariant() << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = parse_args(args);
    } catch (const HelpRequested& h) {
        out << h.text;
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return run(config, out, err);
}

}  // namespace bellmono::cli
