// Runs the acceptance criteria at desk scale and prints one verdict line per criterion.
// Usage: acceptance [criterion ...] ; EMSPEC_WORKERS sets the thread count.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "emspec/validation.hpp"

int main(int argc, char** argv) {
    emspec::AcceptanceOptions opt;
    opt.scale = emspec::Scale::Desk;
    if (const char* w = std::getenv("EMSPEC_WORKERS")) opt.workers = std::max(1, std::atoi(w));
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
    opt.log = [](const std::string& s) { std::fprintf(stderr, "  .. %s\n", s.c_str()); };

    const auto checks = emspec::run_acceptance(opt);
    int failed = 0;
    std::printf("\n");
    for (const auto& c : checks) {
        std::printf("criterion %-2s %s  %-28s (%.0f s)  %s\n", c.id.c_str(), c.passed ? "PASS" : "FAIL",
                    c.title.c_str(), c.seconds, c.detail.c_str());
        failed += c.passed ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", int(checks.size()) - failed, checks.size());
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
