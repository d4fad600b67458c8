#pragma once
// Experiment configuration (TOML). All frequencies and times are in units of w0.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emspec/bath.hpp"
#include "emspec/exponential_fit.hpp"
#include "emspec/hilbert.hpp"

namespace emspec {

struct TimesConfig {
    double t_end = 100.0;
    double dt = 0.02;
    double delta = 0.1;
    bool operator==(const TimesConfig&) const = default;
};

struct DavydovConfig {
    int multiplicity = 6;
    double noise = 1e-3;
    double dt = 0.05;
    std::uint64_t seed = 0;
    bool operator==(const DavydovConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json", "svg"};
    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    std::string name = "experiment";
    SystemModel model;
    BathSpec bath;
    InitialState initial;
    // PTNZE, SNZE, PTBRE, multiD1; "<method>@<Rabi|JC>" overrides the model kind for that entry
    std::vector<std::string> methods;
    TimesConfig times;
    DavydovConfig davydov;
    KernelFitOptions fit;
    OutputConfig outputs;

    // Throws ValidationError.
    void validate() const;
    bool wants(const std::string& format) const;
};

bool operator==(const SystemModel& a, const SystemModel& b);
bool operator==(const BathSpec& a, const BathSpec& b);
bool operator==(const InitialState& a, const InitialState& b);
bool operator==(const KernelFitOptions& a, const KernelFitOptions& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

ExperimentConfig parse_config(const std::string& toml_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// presets/<name>.toml in the source tree.
std::filesystem::path preset_path(const std::string& name);
std::vector<std::string> preset_names();

struct MethodEntry {
    std::string method;  // PTNZE, SNZE, PTBRE or multiD1
    ModelKind model = ModelKind::Rabi;
};

// Splits "<method>[@<kind>]"; throws ValidationError for unknown names.
MethodEntry parse_method_entry(const std::string& entry, ModelKind fallback);

std::string to_string(ModelKind k);
ModelKind model_from_string(const std::string& s);
std::string to_string(QubitState q);
QubitState qubit_from_string(const std::string& s);

} // namespace emspec
