#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bellmono/randomsample.hpp"
#include "bellmono/spinchain.hpp"

namespace bellmono::cli {

enum class Command { Sweep, Bell, Random, Table1, Oracle, Verify };

struct GridSpec {
    double lo = -1.0;
    double hi = 3.0;
    int count = 161;
};

// `lo:hi:count`, inclusive endpoints.
GridSpec parse_grid(const std::string& text);
// `i,j` with 1-based labels; returns 0-based indices.
std::pair<int, int> parse_pair(const std::string& text);

struct RunConfig {
    Command command = Command::Verify;
    int workers = 1;
    std::optional<std::string> out;

    // sweep / bell on chains
    int n = 0;
    GridSpec grid;
    double j2 = 0.0;
    std::pair<int, int> pair{0, 1};
    double tol = 1e-12;
    spinchain::SolverMethod method = spinchain::SolverMethod::Auto;

    // bell / oracle on a state file
    std::optional<std::string> state_file;
    int restarts = 16;
    double oracle_tol = 1e-9;

    // random / table1
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    std::string ensemble = "complex";
    int bins = 100;
    std::vector<int> n_list{3, 4, 5, 6};

    // verify
    bool quick = false;
};

// Validates every numeric parameter; throws UsageError with the offending
// flag. `args` excludes the program name.
RunConfig parse_args(const std::vector<std::string>& args);

// Executes the command. Returns 0 on success, 1 on a domain error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run; usage errors map to exit status 2.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Formatting shared by every emitted file: 12 significant digits.
std::string format_number(double x);
double round12(double x);

std::string sweep_csv(const spinchain::SweepResult& result);
std::string histogram_csv(const sampling::SampleStats& stats);
nlohmann::json sampling_summary(const sampling::SampleStats& stats);
std::string table_csv(const std::vector<sampling::ConvergenceTable>& tables);

// Writes to `path.tmp` and renames over `path`.
void write_atomic(const std::string& path, const std::string& contents);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Cross-module property suite behind `verify`.
std::vector<CheckResult> verify_suite(bool quick, int workers);

}  // namespace bellmono::cli
