#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "finepot/io.hpp"

namespace finepot::cli {

namespace fs = std::filesystem;

/// One invocation: parsed flags, the loaded config and the artifacts written so far.
struct Run {
    std::string command;
    fs::path config_path;
    fs::path base_dir;
    fs::path out;
    std::uint64_t seed = 0;
    bool quick = false;
    int refine = 0;
    Json config = Json::object();
    Json results = Json::object();
    std::vector<std::string> artifacts;
    /// Set by commands whose checks failed; the exit status becomes 1.
    bool checks_failed = false;

    fs::path file(const std::string& name);
    CsvWriter csv(const std::string& name, std::vector<std::string> columns);

    /// Number of resolutions for a refinement study: refine + 1, at least `minimum`.
    int levels(int minimum = 1) const;
};

/// quantity,value,error,tolerance rows.
class Summary {
public:
    Summary(Run& run, const std::string& name);
    void add(const std::string& quantity, double value, double error, double tolerance);
    void flag(const std::string& quantity, bool value);

private:
    CsvWriter out_;
};

/// Writes level,h,value,error,observed_order. Errors are taken against `exact` when given,
/// otherwise as differences between consecutive levels.
void write_refinement(Run& run, const std::string& name, const std::vector<double>& h,
                      const std::vector<double>& values, std::optional<double> exact = std::nullopt);

/// Observed convergence orders for the error sequence on the spacings h (NaN where undefined).
std::vector<double> observed_orders(const std::vector<double>& h, const std::vector<double>& errors);

int cmd_solve(Run& run);
int cmd_capacity(Run& run);
int cmd_adams(Run& run);
int cmd_mazya(Run& run);
int cmd_wiener(Run& run);
int cmd_swisscheese(Run& run);
int cmd_fineint(Run& run);
int cmd_transmission(Run& run);
int cmd_oned(Run& run);
int cmd_suite(Run& run);

} // namespace finepot::cli
