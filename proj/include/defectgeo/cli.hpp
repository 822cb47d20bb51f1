#pragma once

// Batch front end: load a scenario, run one analysis suite and emit a JSON
// report (schema "defectgeo.report/1") plus an optional CSV grid.
//
// Exit codes: 0 all identity checks pass, 1 at least one fails, 2 usage or
// scenario errors (including singular coframes, gauges and deformations).

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace defectgeo::cli {

inline constexpr const char* kReportSchema = "defectgeo.report/1";

inline constexpr const char* kCsvHeader = "x,y,z,b1,b2,b3,O1,O2,O3,m1,m2,m3,rho,B1,B2,B3";

struct Options {
    std::string command;  // check, defects, kinematics, elastic, energy, calibrate
    std::string scenario;
    std::optional<int> grid;
    std::optional<std::string> csv;
    std::optional<std::string> json;
    bool deterministic = false;
    std::optional<double> tolerance;
    std::optional<double> fd_step;
    unsigned threads = 1;
};

/// One executed check. Identities are properties of the implementation and
/// decide the exit code; balances are constraints the input fields may or
/// may not satisfy and are reported only.
struct CheckRecord {
    std::string name;
    std::string kind = "identity";
    double max_residual = 0.0;
    double tolerance = 0.0;

    bool passed() const { return max_residual <= tolerance; }
};

struct Report {
    std::string command;
    std::string scenario;
    std::string fingerprint;
    nlohmann::json settings = nlohmann::json::object();
    nlohmann::json calibration = nlohmann::json::object();
    std::vector<CheckRecord> checks;
    nlohmann::json values = nlohmann::json::object();
    std::optional<double> timing_ms;

    bool passed() const;
    /// First failing identity check, if any.
    const CheckRecord* first_failure() const;
    nlohmann::json to_json() const;
};

/// 64-bit FNV-1a of the scenario text as 16 hex digits.
std::string fingerprint(std::string_view text);

/// Runs one command; throws defectgeo::Error on scenario or numeric errors.
/// `csv` receives the grid for the defects command when non-null.
Report execute(const Options& options, std::ostream* csv = nullptr);

/// Full command line handling; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Worker count from DEFECTGEO_THREADS, else the hardware concurrency.
unsigned thread_budget();

}  // namespace defectgeo::cli
