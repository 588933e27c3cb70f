#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace chemolab {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    /// Measured margins, or the reason for a failure.
    std::string detail;
    double seconds = 0.0;
};

constexpr int acceptance_criterion_count = 10;

/// Runs criterion `id` in 1..acceptance_criterion_count; never throws.
CriterionResult run_criterion(int id);

/// Runs every criterion on up to `jobs` threads, results ordered by id.
/// `on_done` is called (serialized) as each criterion finishes.
std::vector<CriterionResult> run_acceptance(std::size_t jobs,
                                            const std::function<void(const CriterionResult&)>& on_done = {});

/// "[PASS] 3 mass bound: ..." (runtime excluded so the line is reproducible).
std::string format_result(const CriterionResult& r);

}  // namespace chemolab
