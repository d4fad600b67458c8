// Command-line driver: validity curves, spectrum runs, comparisons and the oracle suite.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

#include "emspec/experiment.hpp"
#include "emspec/validation.hpp"

namespace fs = std::filesystem;
using namespace emspec;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kAcceptance = 3 };

struct Common {
    std::string config;
    std::string preset;
    std::string out;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

LogFn make_logger(bool quiet) {
    if (quiet) return {};
    const auto start = std::chrono::steady_clock::now();
    return [start](const std::string& msg) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "[%8.1fs] %s\n", s, msg.c_str());
    };
}

ExperimentConfig resolve_config(const Common& c) {
    if (c.config.empty() == c.preset.empty()) throw ValidationError("give exactly one of --config or --preset");
    ExperimentConfig cfg = c.config.empty() ? load_config(preset_path(c.preset)) : load_config(c.config);
    if (!c.out.empty()) cfg.outputs.directory = c.out;
    if (c.seed) cfg.davydov.seed = *c.seed;
    cfg.validate();
    return cfg;
}

void print_report(const ComparisonReport& rep) {
    std::printf("%-8s %10s %10s %8s %10s %s\n", "method", "min/max", "stability", "seconds", "sigma2", "peaks");
    for (const auto& r : rep.results) {
        std::string peaks;
        for (const auto& p : r.peaks) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.3f", p.omega);
            peaks += buf;
        }
        std::printf("%-8s %10.2e %10.4f %8.1f %10s%s%s\n", r.method.c_str(), r.min_ratio, r.spectrum.stability,
                    r.seconds, r.max_sigma2 >= 0 ? std::to_string(r.max_sigma2).c_str() : "-", peaks.c_str(),
                    r.negative ? "  [negative]" : "");
    }
    if (rep.results.size() > 1) {
        std::printf("\nnormalized L1 distances\n%-8s", "");
        for (const auto& r : rep.results) std::printf(" %8s", r.method.c_str());
        std::printf("\n");
        for (std::size_t i = 0; i < rep.results.size(); ++i) {
            std::printf("%-8s", rep.results[i].method.c_str());
            for (std::size_t j = 0; j < rep.results.size(); ++j)
                std::printf(" %8.4f", rep.distances(Eigen::Index(i), Eigen::Index(j)));
            std::printf("\n");
        }
    }
}

int run_spectrum_verb(const Common& c, bool davydov_only) {
    ExperimentConfig cfg = resolve_config(c);
    if (davydov_only) cfg.methods = {"multiD1"};
    const fs::path dir = cfg.outputs.directory;
    RunOptions opt;
    opt.workers = c.workers;
    opt.cache_dir = dir / "fit-cache";
    opt.log = make_logger(c.quiet);
    const ComparisonReport rep = run_spectrum(cfg, opt);
    write_outputs(cfg, rep, dir);
    print_report(rep);
    std::printf("\nwrote %s\n", dir.string().c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spontaneous emission spectra of a qubit-cavity system in an Ohmic reservoir"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub, bool config) {
        if (config) {
            sub->add_option("--config", c.config, "experiment TOML file");
            sub->add_option("--preset", c.preset, "preset name (see --list-presets)");
            sub->add_option("--seed", c.seed, "seed for the variational initialization noise");
        }
        sub->add_option("--out", c.out, "output directory");
        sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
        sub->add_flag("--quiet,-q", c.quiet, "no progress on stderr");
    };

    auto* validity = app.add_subcommand("validity", "correlation magnitudes at t=0 versus alpha");
    double alpha_max = 0.5, alpha_step = 0.01, omega_cut = 5.0;
    validity->add_option("--alpha-max", alpha_max, "largest alpha");
    validity->add_option("--alpha-step", alpha_step, "alpha spacing")->check(CLI::PositiveNumber);
    validity->add_option("--omega-cut", omega_cut, "reservoir cutoff")->check(CLI::PositiveNumber);
    add_common(validity, false);

    auto* spectrum = app.add_subcommand("spectrum", "run every method of an experiment and compare");
    bool list_presets = false;
    spectrum->add_flag("--list-presets", list_presets, "print the preset names and exit");
    add_common(spectrum, true);

    auto* davydov = app.add_subcommand("davydov", "multi-D1 run only, with trajectory output");
    add_common(davydov, true);

    auto* compare = app.add_subcommand("compare", "rebuild the comparison of spectrum CSVs in a directory");
    std::string compare_dir;
    compare->add_option("dir", compare_dir, "directory with spectrum-<method>.csv files")->required();
    compare->add_option("--out", c.out, "write comparison.json here");

    auto* oracle = app.add_subcommand("oracle", "derived checks and acceptance criteria");
    std::string scale_name = "tiny";
    bool allow_paper = false;
    std::vector<int> only;
    oracle->add_option("--scale", scale_name, "tiny, desk or paper")
        ->check(CLI::IsMember({"tiny", "desk", "paper"}));
    oracle->add_flag("--allow-paper", allow_paper, "required for --scale paper (days of CPU time)");
    oracle->add_option("--only", only, "acceptance criteria to run (desk and paper)");
    add_common(oracle, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validity) {
            if (alpha_max < 0.0 || alpha_max > 0.5) throw ValidationError("--alpha-max must lie in [0, 0.5]");
            std::vector<double> alphas;
            const int n = int(std::floor(alpha_max / alpha_step + 1e-9));
            for (int i = 0; i <= n; ++i) alphas.push_back(alpha_step * i);
            const auto rows = run_validity_curve(alphas, omega_cut, 1.0);
            const fs::path dir = c.out.empty() ? fs::path("out") : fs::path(c.out);
            write_validity(dir, rows, omega_cut);
            std::printf("%6s %14s %14s %10s\n", "alpha", "|C(0)|/wc^2", "|C~(0)|/wc^2", "eta");
            int failed = 0;
            for (const auto& r : rows) {
                if (!r.error.empty()) {
                    ++failed;
                    std::printf("%6.3f  failed: %s\n", r.alpha, r.error.c_str());
                    continue;
                }
                std::printf("%6.3f %14.6e %14.6e %10.6f\n", r.alpha, r.bare, r.transformed, r.eta);
            }
            std::printf("\nwrote %s\n", (dir / "validity.csv").string().c_str());
            return failed ? kNumerical : kOk;
        }
        if (*spectrum) {
            if (list_presets) {
                for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
                return kOk;
            }
            return run_spectrum_verb(c, false);
        }
        if (*davydov) return run_spectrum_verb(c, true);
        if (*compare) {
            const ComparisonReport rep = compare_directory(compare_dir);
            print_report(rep);
            if (!c.out.empty()) {
                fs::create_directories(c.out);
                write_json(fs::path(c.out) / "comparison.json", rep.to_json());
            }
            return kOk;
        }
        if (*oracle) {
            const Scale scale = scale_from_string(scale_name);
            if (scale == Scale::Paper && !allow_paper)
                throw ValidationError("--scale paper runs for days; pass --allow-paper to confirm");
            if (scale == Scale::Paper)
                std::fprintf(stderr, "warning: paper scale uses 500 modes and M=12; expect days of CPU time\n");
            AcceptanceOptions opt;
            opt.scale = scale;
            opt.workers = c.workers;
            opt.log = make_logger(c.quiet);
            opt.only = only;
            const SuiteReport rep = run_oracle_suite(scale, opt);
            for (const auto& k : rep.checks)
                std::printf("%s %-22s %7.1fs  %s\n", k.passed ? "PASS" : "FAIL", k.id.c_str(), k.seconds,
                            k.detail.c_str());
            const fs::path dir = c.out.empty() ? fs::path("out") : fs::path(c.out);
            fs::create_directories(dir);
            write_json(dir / ("oracle-" + scale_name + ".json"), rep.to_json());
            return rep.passed() ? kOk : kAcceptance;
        }
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumerical;
    }
    return kOk;
}
