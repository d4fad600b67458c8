#pragma once
// Orchestration: validity curves, multi-method spectrum runs and their comparison.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "emspec/config.hpp"
#include "emspec/davydov.hpp"
#include "emspec/io.hpp"
#include "emspec/regression.hpp"

namespace emspec {

struct ValidityRow {
    double alpha = 0.0;
    double bare = 0.0;         // |C(0)| / w_cut^2
    double transformed = 0.0;  // |C~(0)| / w_cut^2
    double eta = 1.0;
    std::string error;         // quadrature or renormalization failure, empty on success
};

// Throws ValidationError for alpha outside [0, 0.5]; numerical failures are reported per row.
std::vector<ValidityRow> run_validity_curve(const std::vector<double>& alphas, double omega_cut, double omega0);
void write_validity(const std::filesystem::path& dir, const std::vector<ValidityRow>& rows, double omega_cut);

using LogFn = std::function<void(const std::string&)>;

struct RunOptions {
    int workers = 1;
    std::filesystem::path cache_dir;  // fit cache; empty disables caching
    LogFn log;
};

struct MethodResult {
    std::string method;  // PTNZE, SNZE, PTBRE or multiD1
    SpectrumResult spectrum;
    std::vector<Peak> peaks;  // 5% prominence
    double min_ratio = 0.0;   // min N / max N
    bool negative = false;    // min N < -0.01 max N
    double seconds = 0.0;
    // multiD1 only
    double max_sigma2 = -1.0;
    bool degraded = false;
    std::vector<DavydovSample> trajectory;
};

struct ComparisonReport {
    std::string name;
    std::vector<MethodResult> results;
    Eigen::MatrixXd distances;        // normalized L1, symmetric
    std::vector<double> dressed_gaps; // E_j - E_0 of the renormalized system Hamiltonian
    double eta = 1.0;

    const MethodResult* find(const std::string& method) const;
    double distance(const std::string& a, const std::string& b) const;
    Json to_json() const;
};

// Negativity threshold used for the flag in MethodResult.
constexpr double kNegativityFlag = 0.01;

MethodResult summarize(std::string method, SpectrumResult spectrum);
ComparisonReport compare(std::string name, std::vector<MethodResult> results);

ComparisonReport run_spectrum(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Per-method spectrum CSVs (+ JSON sidecars), report.json, overlay SVG, Davydov trajectories.
void write_outputs(const ExperimentConfig& cfg, const ComparisonReport& report, const std::filesystem::path& dir);

// Reads <dir>/spectrum-<method>.csv for every method present and rebuilds the comparison.
ComparisonReport compare_directory(const std::filesystem::path& dir);

} // namespace emspec
