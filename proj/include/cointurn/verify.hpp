#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cointurn/version.hpp"

namespace cointurn {

// One measured statistic against its pinned threshold.
struct CheckResult {
    std::string id;
    std::string claim;
    double measured = 0.0;
    std::string relation;  // "<", "<=", "in", "==", ">"
    double threshold = 0.0;
    double threshold_hi = 0.0;  // upper edge for "in"
    bool passed = false;
};

struct CriterionResult {
    int number = 0;
    std::string name;
    double budget_seconds = 0.0;   // declared runtime budget
    double runtime_seconds = 0.0;  // measured (not serialized)
    std::vector<CheckResult> checks;
    bool passed = false;
};

struct VerifyReport {
    std::string version;
    std::uint64_t master_seed = 0;
    std::vector<CriterionResult> criteria;
    bool all_passed = false;
};

// Runs the numbered verification criteria (all of them, or the subset listed
// in `only`) with seeds derived from the master seed. Deterministic: the same
// master seed yields byte-identical JSON.
VerifyReport run_verification(std::uint64_t master_seed = kDefaultMasterSeed,
                              const std::vector<int>& only = {});

// Serialization omits measured runtimes so reports stay byte-reproducible.
std::string report_to_json(const VerifyReport& report);

}  // namespace cointurn
