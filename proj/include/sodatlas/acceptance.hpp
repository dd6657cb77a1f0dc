#pragma once

#include <string>
#include <vector>

namespace sodatlas {

struct CriterionResult {
    int number = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Time limits in seconds, fixed.
inline constexpr double kTableLimitSeconds = 1.0;
inline constexpr double kReplayLimitSeconds = 10.0;
inline constexpr double kSearchLimitSeconds = 1.0;

std::vector<CriterionResult> run_acceptance();
// "PASS  3  title: detail"
std::string format_criterion(const CriterionResult& r);

} // namespace sodatlas
