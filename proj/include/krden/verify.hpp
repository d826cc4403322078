#pragma once

#include <string>
#include <vector>

namespace krden {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // short failure note or summary statistic
    double seconds = 0.0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

// Runs the consistency battery.  Tier "fast" covers the sub-minute checks,
// tier "slow" additionally runs the brute-force confirmations.
VerifyReport run_verify(const std::string& tier);

}  // namespace krden
