#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "finepot/acceptance.hpp"

int main(int argc, char** argv) {
    finepot::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opt.quick = true;
        else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) opt.seed = std::strtoull(argv[++i], nullptr, 10);
    }
    int failed = 0;
    for (int id = 1; id <= finepot::kCriterionCount; ++id) {
        auto r = finepot::run_criterion(id, opt);
        std::printf("[%s] %2d %-26s %7.2f s / %.0f s  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                    r.limit_seconds, r.detail.c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    std::printf("%d of %d criteria passed\n", finepot::kCriterionCount - failed, finepot::kCriterionCount);
    return failed == 0 ? 0 : 1;
}
