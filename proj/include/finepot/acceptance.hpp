#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace finepot {

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    /// Smaller random batches; deterministic fixtures are unchanged.
    bool quick = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;
};

constexpr int kCriterionCount = 12;

/// Runs one acceptance criterion (1..12). A run over its time budget fails unless quick is set.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

} // namespace finepot
