// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include "coarseforge/scenarios.hpp"

#include <cstdio>

int main() {
    using namespace coarseforge;
    int failures = 0;
    int index = 0;
    for (auto* scenario : all_scenarios()) {
        ScenarioResult r = scenario();
        ++index;
        std::printf("[%s] %2d. %-24s %6.2fs  %s\n", r.pass ? "PASS" : "FAIL", index,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %d criteria passed\n", index);
    return failures == 0 ? 0 : 1;
}
