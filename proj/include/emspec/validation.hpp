#pragma once
// Oracle suite and acceptance criteria shared by the CLI and the acceptance test binary.

#include <string>
#include <vector>

#include "emspec/experiment.hpp"

namespace emspec {

enum class Scale { Tiny, Desk, Paper };

Scale scale_from_string(const std::string& s);
std::string to_string(Scale s);

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteReport {
    std::string scale;
    std::vector<CheckResult> checks;

    bool passed() const;
    Json to_json() const;
};

// Problem sizes per scale.
struct ScaleParams {
    bool paper = false;
    int min_modes = 150;
    int multiplicity = 6;
    double me_dt = 0.02;
    double davydov_dt = 0.05;
    double davydov_noise = 1e-3;

    // Final time for a steady spectrum; weaker damping needs longer runs.
    double t_final(double alpha) const;
    // Enough modes that the discretized bath does not return emitted light before t_final:
    // the recurrence time near the emission band is about 1.02 n_modes.
    int n_modes(double alpha) const;
};

ScaleParams scale_params(Scale s);

struct AcceptanceOptions {
    Scale scale = Scale::Desk;
    int workers = 1;
    LogFn log;
    std::vector<int> only;  // criterion numbers; empty runs all ten
};

// Criteria 1-10 in order. A criterion whose computation throws is reported as failed.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opt);

// Fast derived-oracle checks (tiny); desk and paper scale append the acceptance criteria.
SuiteReport run_oracle_suite(Scale scale, const AcceptanceOptions& opt);

} // namespace emspec
