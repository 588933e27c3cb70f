#include <iostream>

#include "chemolab/acceptance.hpp"
#include "chemolab/harness.hpp"

int main() {
    const auto results = chemolab::run_acceptance(chemolab::default_jobs());
    int failed = 0;
    for (const auto& r : results) {
        std::cout << chemolab::format_result(r) << " (" << r.seconds << " s)\n";
        if (!r.passed) ++failed;
    }
    std::cout << (failed == 0 ? "all acceptance criteria passed" : "acceptance criteria failed: ")
              << (failed == 0 ? "" : std::to_string(failed)) << '\n';
    return failed == 0 ? 0 : 1;
}
