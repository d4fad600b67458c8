#include "emspec/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "emspec/meq.hpp"

namespace emspec {

namespace fs = std::filesystem;

std::string to_string(ModelKind k) { return k == ModelKind::Rabi ? "Rabi" : "JC"; }

ModelKind model_from_string(const std::string& s) {
    if (s == "Rabi" || s == "rabi") return ModelKind::Rabi;
    if (s == "JC" || s == "jc") return ModelKind::JC;
    throw ValidationError("unknown model kind '" + s + "' (Rabi or JC)");
}

std::string to_string(QubitState q) {
    switch (q) {
    case QubitState::Excited: return "e";
    case QubitState::Ground: return "g";
    case QubitState::Plus: return "+";
    case QubitState::Minus: return "-";
    }
    return "?";
}

QubitState qubit_from_string(const std::string& s) {
    if (s == "e" || s == "excited") return QubitState::Excited;
    if (s == "g" || s == "ground") return QubitState::Ground;
    if (s == "+" || s == "plus") return QubitState::Plus;
    if (s == "-" || s == "minus") return QubitState::Minus;
    throw ValidationError("unknown qubit state '" + s + "' (e, g, +, -)");
}

bool operator==(const SystemModel& a, const SystemModel& b) {
    return a.kind == b.kind && a.omega0 == b.omega0 && a.omega_c == b.omega_c && a.lambda_c == b.lambda_c &&
           a.n_cavity == b.n_cavity;
}
bool operator==(const BathSpec& a, const BathSpec& b) {
    return a.alpha == b.alpha && a.omega_cut == b.omega_cut && a.omega_max == b.omega_max &&
           a.n_modes == b.n_modes;
}
bool operator==(const InitialState& a, const InitialState& b) {
    return a.qubit == b.qubit && a.cavity_fock == b.cavity_fock;
}
bool operator==(const KernelFitOptions& a, const KernelFitOptions& b) {
    return a.max_terms == b.max_terms && a.window_cutoffs == b.window_cutoffs && a.step_cutoffs == b.step_cutoffs &&
           a.rel_tolerance == b.rel_tolerance;
}
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.name == b.name && a.model == b.model && a.bath == b.bath && a.initial == b.initial &&
           a.methods == b.methods && a.times == b.times && a.davydov == b.davydov && a.fit == b.fit &&
           a.outputs == b.outputs;
}

void ExperimentConfig::validate() const {
    model.validate();
    bath.validate();
    if (methods.empty()) throw ValidationError("config lists no methods");
    for (const auto& m : methods) parse_method_entry(m, model.kind);
    if (initial.cavity_fock < 0 || initial.cavity_fock >= model.n_cavity)
        throw ValidationError("initial Fock state outside the cavity truncation");
    TimeGrid{times.t_end, times.delta, times.dt}.validate();
    if (davydov.multiplicity < 1) throw ValidationError("davydov multiplicity must be >= 1");
    if (!(davydov.noise >= 0.0)) throw ValidationError("davydov noise must be >= 0");
    if (!(davydov.dt > 0.0) || davydov.dt > times.delta)
        throw ValidationError("davydov dt must lie in (0, delta]");
    if (fit.max_terms < 1 || !(fit.rel_tolerance > 0.0)) throw ValidationError("invalid fit options");
    for (const auto& f : outputs.formats)
        if (f != "csv" && f != "json" && f != "svg") throw ValidationError("unknown output format '" + f + "'");
}

MethodEntry parse_method_entry(const std::string& entry, ModelKind fallback) {
    MethodEntry e;
    const auto at = entry.find('@');
    e.method = entry.substr(0, at);
    e.model = at == std::string::npos ? fallback : model_from_string(entry.substr(at + 1));
    if (e.method != "multiD1") method_from_string(e.method);
    return e;
}

bool ExperimentConfig::wants(const std::string& format) const {
    return std::find(outputs.formats.begin(), outputs.formats.end(), format) != outputs.formats.end();
}

namespace {

template <class T>
T get_or(const toml::table& t, std::string_view key, T fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    if constexpr (std::is_same_v<T, double>) {
        if (auto v = node->value<double>()) return *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (auto v = node->value<std::string>()) return *v;
    } else {
        if (auto v = node->value<std::int64_t>()) return T(*v);
    }
    throw ValidationError("config key '" + std::string(key) + "' has the wrong type");
}

const toml::table* section(const toml::table& root, std::string_view name) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    if (!node->is_table()) throw ValidationError("config entry '" + std::string(name) + "' must be a table");
    return node->as_table();
}

std::vector<std::string> string_array(const toml::table& t, std::string_view key,
                                      std::vector<std::string> fallback) {
    const auto* node = t.get(key);
    if (!node) return fallback;
    const auto* arr = node->as_array();
    if (!arr) throw ValidationError("config key '" + std::string(key) + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *arr) {
        auto v = e.value<std::string>();
        if (!v) throw ValidationError("config key '" + std::string(key) + "' must be an array of strings");
        out.push_back(*v);
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "config parse error: " << e.description() << " at line " << e.source().begin.line;
        throw ValidationError(os.str());
    }
    ExperimentConfig c;
    c.name = get_or<std::string>(root, "name", c.name);
    c.methods = string_array(root, "methods", {});
    if (const auto* m = section(root, "model")) {
        c.model.kind = model_from_string(get_or<std::string>(*m, "kind", to_string(c.model.kind)));
        c.model.omega_c = get_or(*m, "omega_c", c.model.omega_c);
        c.model.lambda_c = get_or(*m, "lambda_c", c.model.lambda_c);
        c.model.n_cavity = get_or(*m, "n_cavity", c.model.n_cavity);
    }
    if (const auto* b = section(root, "bath")) {
        c.bath.alpha = get_or(*b, "alpha", c.bath.alpha);
        c.bath.omega_cut = get_or(*b, "omega_cut", c.bath.omega_cut);
        c.bath.omega_max = get_or(*b, "omega_max", c.bath.omega_max);
        c.bath.n_modes = get_or(*b, "n_modes", c.bath.n_modes);
    }
    if (const auto* i = section(root, "initial")) {
        c.initial.qubit = qubit_from_string(get_or<std::string>(*i, "qubit", to_string(c.initial.qubit)));
        c.initial.cavity_fock = get_or(*i, "fock_n", c.initial.cavity_fock);
    }
    if (const auto* t = section(root, "times")) {
        c.times.t_end = get_or(*t, "T", c.times.t_end);
        c.times.dt = get_or(*t, "dt", c.times.dt);
        c.times.delta = get_or(*t, "delta", c.times.delta);
    }
    if (const auto* d = section(root, "davydov")) {
        c.davydov.multiplicity = get_or(*d, "M", c.davydov.multiplicity);
        c.davydov.noise = get_or(*d, "noise", c.davydov.noise);
        c.davydov.dt = get_or(*d, "dt", c.davydov.dt);
        c.davydov.seed = get_or(*d, "seed", c.davydov.seed);
    }
    if (const auto* f = section(root, "fit")) {
        c.fit.max_terms = get_or(*f, "max_terms", c.fit.max_terms);
        c.fit.window_cutoffs = get_or(*f, "window_cutoffs", c.fit.window_cutoffs);
        c.fit.step_cutoffs = get_or(*f, "step_cutoffs", c.fit.step_cutoffs);
        c.fit.rel_tolerance = get_or(*f, "rel_tolerance", c.fit.rel_tolerance);
    }
    if (const auto* o = section(root, "outputs")) {
        c.outputs.directory = get_or<std::string>(*o, "directory", c.outputs.directory);
        c.outputs.formats = string_array(*o, "formats", c.outputs.formats);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    auto strings = [](const std::vector<std::string>& v) {
        toml::array a;
        for (const auto& s : v) a.push_back(s);
        return a;
    };
    toml::table root{
        {"name", c.name},
        {"methods", strings(c.methods)},
        {"model", toml::table{{"kind", to_string(c.model.kind)},
                              {"omega_c", c.model.omega_c},
                              {"lambda_c", c.model.lambda_c},
                              {"n_cavity", c.model.n_cavity}}},
        {"bath", toml::table{{"alpha", c.bath.alpha},
                             {"omega_cut", c.bath.omega_cut},
                             {"omega_max", c.bath.omega_max},
                             {"n_modes", c.bath.n_modes}}},
        {"initial", toml::table{{"qubit", to_string(c.initial.qubit)}, {"fock_n", c.initial.cavity_fock}}},
        {"times", toml::table{{"T", c.times.t_end}, {"dt", c.times.dt}, {"delta", c.times.delta}}},
        {"davydov", toml::table{{"M", c.davydov.multiplicity},
                                {"noise", c.davydov.noise},
                                {"dt", c.davydov.dt},
                                {"seed", std::int64_t(c.davydov.seed)}}},
        {"fit", toml::table{{"max_terms", c.fit.max_terms},
                            {"window_cutoffs", c.fit.window_cutoffs},
                            {"step_cutoffs", c.fit.step_cutoffs},
                            {"rel_tolerance", c.fit.rel_tolerance}}},
        {"outputs", toml::table{{"directory", c.outputs.directory}, {"formats", strings(c.outputs.formats)}}},
    };
    std::ostringstream os;
    os << root << '\n';
    return os.str();
}

fs::path preset_path(const std::string& name) {
    const fs::path p = fs::path(EMSPEC_PRESET_DIR) / (name + ".toml");
    if (!fs::exists(p)) throw ValidationError("unknown preset '" + name + "'");
    return p;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    if (!fs::exists(EMSPEC_PRESET_DIR)) return out;
    for (const auto& e : fs::directory_iterator(EMSPEC_PRESET_DIR))
        if (e.path().extension() == ".toml") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace emspec
