#pragma once
// File formats: spectrum and trajectory CSV, JSON sidecars, the fit cache, checkpoints and SVG plots.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emspec/davydov.hpp"
#include "emspec/exponential_fit.hpp"
#include "emspec/meq.hpp"
#include "emspec/regression.hpp"

namespace emspec {

using Json = nlohmann::json;

// Columns omega,N,normalized. Numbers are written with 17 significant digits so reruns are byte-identical.
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& s);
Json spectrum_metadata(const SpectrumResult& s);
SpectrumResult read_spectrum_csv(const std::filesystem::path& path);

// Columns t,sigma_z,sigma_x,norm,sigma2.
void write_davydov_csv(const std::filesystem::path& path, const std::vector<DavydovSample>& samples);

Json to_json(const ExponentialFit& fit);
ExponentialFit fit_from_json(const Json& j);

// One JSON file per (kernel, alpha, w_cut, w0, eta, fit options) under a directory.
class FitCache {
public:
    explicit FitCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path path_for(KernelKind kind, const BathSpec& spec, const Renormalization& renorm,
                                   const KernelFitOptions& opt) const;
    // Loads a cached fit or computes and stores one. hit reports which happened.
    ExponentialFit get(KernelKind kind, const BathSpec& spec, const Renormalization& renorm,
                       const KernelFitOptions& opt = {}, bool* hit = nullptr) const;

private:
    std::filesystem::path dir_;
};

// Versioned density-trajectory checkpoint.
constexpr int kCheckpointVersion = 1;
Json to_json(const DensityTrajectory& traj);
DensityTrajectory trajectory_from_json(const Json& j);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title;
    std::string x_label, y_label;
    bool log_y = false;
    std::optional<double> reference_y;  // dashed horizontal line
};

// Minimal line-plot writer; one polyline per series with a legend.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace emspec
