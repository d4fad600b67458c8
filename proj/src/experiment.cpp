#include "emspec/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace emspec {

namespace fs = std::filesystem;

std::vector<ValidityRow> run_validity_curve(const std::vector<double>& alphas, double omega_cut, double omega0) {
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 0.5)) throw ValidationError("validity curve alpha must lie in [0, 0.5]");
    std::vector<ValidityRow> rows;
    for (double a : alphas) {
        ValidityRow r;
        r.alpha = a;
        try {
            BathSpec spec;
            spec.alpha = a;
            spec.omega_cut = omega_cut;
            spec.omega_max = 4.0 * omega_cut;
            const ValidityMetrics m = validity_metrics(spec, omega0);
            r.bare = m.c0_bare_scaled;
            r.transformed = m.c0_transformed_scaled;
            r.eta = m.eta;
        } catch (const NumericalError& e) {
            r.error = e.what();
        }
        rows.push_back(r);
    }
    return rows;
}

void write_validity(const fs::path& dir, const std::vector<ValidityRow>& rows, double omega_cut) {
    std::ostringstream csv;
    csv << "alpha,bare,transformed,eta,error\n";
    PlotSeries bare{"|C(0)|", {}, {}}, tr{"|C~(0)|", {}, {}};
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", r.alpha, r.bare, r.transformed, r.eta);
        csv << buf << r.error << '\n';
        if (!r.error.empty()) continue;
        bare.x.push_back(r.alpha);
        bare.y.push_back(r.bare);
        tr.x.push_back(r.alpha);
        tr.y.push_back(r.transformed);
    }
    write_text(dir / "validity.csv", csv.str());
    PlotSpec ps;
    char title[64];
    std::snprintf(title, sizeof title, "kernel at t = 0, w_cut = %g", omega_cut);
    ps.title = title;
    ps.x_label = "alpha";
    ps.y_label = "|C(0)| / w_cut^2";
    ps.log_y = true;
    ps.reference_y = 1e-2;
    write_text(dir / "validity.svg", render_svg({bare, tr}, ps));
}

const MethodResult* ComparisonReport::find(const std::string& method) const {
    for (const auto& r : results)
        if (r.method == method) return &r;
    return nullptr;
}

double ComparisonReport::distance(const std::string& a, const std::string& b) const {
    Eigen::Index ia = -1, ib = -1;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].method == a) ia = Eigen::Index(i);
        if (results[i].method == b) ib = Eigen::Index(i);
    }
    if (ia < 0 || ib < 0) throw ValidationError("method missing from report: " + (ia < 0 ? a : b));
    return distances(ia, ib);
}

Json ComparisonReport::to_json() const {
    Json j;
    j["name"] = name;
    j["eta"] = eta;
    j["dressed_gaps"] = dressed_gaps;
    Json methods = Json::array();
    for (const auto& r : results) {
        Json m = spectrum_metadata(r.spectrum);
        m["method"] = r.method;
        m["min_ratio"] = r.min_ratio;
        m["negative"] = r.negative;
        m["seconds"] = r.seconds;
        Json peaks = Json::array();
        for (const auto& p : r.peaks)
            peaks.push_back({{"omega", p.omega}, {"height", p.height}, {"prominence", p.prominence}});
        m["peaks"] = peaks;
        if (r.max_sigma2 >= 0.0) {
            m["max_sigma2"] = r.max_sigma2;
            m["degraded"] = r.degraded;
        }
        methods.push_back(m);
    }
    j["methods"] = methods;
    Json dist = Json::object();
    for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b)
            dist[results[a].method + "/" + results[b].method] = distances(Eigen::Index(a), Eigen::Index(b));
    j["l1_distances"] = dist;
    return j;
}

MethodResult summarize(std::string method, SpectrumResult spectrum) {
    MethodResult r;
    r.method = std::move(method);
    r.spectrum = std::move(spectrum);
    const RealVector& v = r.spectrum.values;
    const double top = v.size() ? v.maxCoeff() : 0.0;
    r.min_ratio = top > 0.0 ? v.minCoeff() / top : 0.0;
    r.negative = r.min_ratio < -kNegativityFlag;
    r.peaks = find_peaks(r.spectrum.frequencies, v);
    return r;
}

ComparisonReport compare(std::string name, std::vector<MethodResult> results) {
    ComparisonReport rep;
    rep.name = std::move(name);
    rep.results = std::move(results);
    const auto n = Eigen::Index(rep.results.size());
    rep.distances = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const auto& sa = rep.results[std::size_t(a)].spectrum;
            const auto& sb = rep.results[std::size_t(b)].spectrum;
            if (sa.frequencies.size() != sb.frequencies.size() ||
                (sa.frequencies - sb.frequencies).cwiseAbs().maxCoeff() > 1e-12)
                throw ValidationError("spectra of " + rep.results[std::size_t(a)].method + " and " +
                                      rep.results[std::size_t(b)].method + " use different frequency grids");
            rep.distances(a, b) = rep.distances(b, a) = normalized_l1_distance(sa.frequencies, sa.values, sb.values);
        }
    return rep;
}

namespace {

std::string describe(const ExperimentConfig& c, const SystemModel& m) {
    std::ostringstream os;
    os << to_string(m.kind) << " lambda_c=" << m.lambda_c << " alpha=" << c.bath.alpha << " |"
       << to_string(c.initial.qubit) << "," << c.initial.cavity_fock << ">";
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

ComparisonReport run_spectrum(const ExperimentConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    auto log = [&](const std::string& s) {
        if (opt.log) opt.log(s);
    };
    const DiscretizedBath bath = discretize(cfg.bath);
    const Renormalization renorm = solve_renormalization(cfg.bath, cfg.model.omega0);
    const TimeGrid grid{cfg.times.t_end, cfg.times.delta, cfg.times.dt};

    auto fit_for = [&](KernelKind kind) {
        if (opt.cache_dir.empty()) return fit_kernel(kind, cfg.bath, renorm, cfg.fit);
        bool hit = false;
        auto fit = FitCache(opt.cache_dir).get(kind, cfg.bath, renorm, cfg.fit, &hit);
        log(std::string("fit ") + (kind == KernelKind::Bare ? "bare" : "transformed") + (hit ? " (cached)" : ""));
        return fit;
    };

    std::vector<MethodResult> results;
    for (const auto& name : cfg.methods) {
        const auto t0 = std::chrono::steady_clock::now();
        const MethodEntry entry = parse_method_entry(name, cfg.model.kind);
        SystemModel model = cfg.model;
        model.kind = entry.model;
        log(name + ": " + describe(cfg, model));
        if (entry.method == "multiD1") {
            DavydovOptions o;
            o.multiplicity = cfg.davydov.multiplicity;
            o.noise = cfg.davydov.noise;
            o.seed = cfg.davydov.seed;
            o.dt = cfg.davydov.dt;
            o.t_end = cfg.times.t_end;
            o.delta = cfg.times.delta;
            DavydovRun run = run_davydov(model, bath, cfg.initial, o);
            run.spectrum.method = "multiD1";
            run.spectrum.metadata["multiplicity"] = std::to_string(o.multiplicity);
            MethodResult r = summarize(name, run.spectrum);
            r.max_sigma2 = run.max_sigma2;
            r.degraded = run.degraded;
            r.trajectory = std::move(run.samples);
            r.seconds = seconds_since(t0);
            results.push_back(std::move(r));
        } else {
            const MethodKind kind = method_from_string(entry.method);
            const ExponentialFit fit = fit_for(kind == MethodKind::SNZE ? KernelKind::Bare : KernelKind::Transformed);
            const MethodSetup setup = make_setup(kind, model, renorm, fit);
            const CorrelationGrid cg = build_grid(setup, initial_density(model, cfg.initial), grid, opt.workers);
            SpectrumResult s = steady_state_spectrum(cg, bath.omegas, bath.couplings);
            s.metadata["fit_terms"] = std::to_string(fit.size());
            s.metadata["fit_max_abs_error"] = std::to_string(fit.max_abs_error);
            if (kind == MethodKind::PTBRE) s.metadata["reconstructed"] = "true";
            MethodResult r = summarize(name, std::move(s));
            r.seconds = seconds_since(t0);
            results.push_back(std::move(r));
        }
        auto& r = results.back();
        r.spectrum.metadata["model"] = to_string(model.kind);
        r.spectrum.metadata["lambda_c"] = std::to_string(cfg.model.lambda_c);
        r.spectrum.metadata["alpha"] = std::to_string(cfg.bath.alpha);
        r.spectrum.metadata["n_modes"] = std::to_string(cfg.bath.n_modes);
        r.spectrum.metadata["eta"] = std::to_string(renorm.eta);
        std::ostringstream os;
        os << name << " done in " << r.seconds << " s, stability " << r.spectrum.stability << ", min/max "
           << r.min_ratio;
        if (r.max_sigma2 >= 0.0) os << ", max sigma2 " << r.max_sigma2;
        log(os.str());
    }

    ComparisonReport rep = compare(cfg.name, std::move(results));
    rep.eta = renorm.eta;
    const RealVector e = dressed_spectrum(build_hamiltonian(cfg.model, renorm.eta)).energies;
    for (Eigen::Index i = 1; i < std::min<Eigen::Index>(e.size(), 8); ++i) rep.dressed_gaps.push_back(e(i) - e(0));
    return rep;
}

void write_outputs(const ExperimentConfig& cfg, const ComparisonReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<PlotSeries> series;
    for (const auto& r : report.results) {
        if (cfg.wants("csv")) {
            write_spectrum_csv(dir / ("spectrum-" + r.method + ".csv"), r.spectrum);
            if (!r.trajectory.empty()) write_davydov_csv(dir / ("trajectory-" + r.method + ".csv"), r.trajectory);
        }
        if (cfg.wants("json")) write_json(dir / ("spectrum-" + r.method + ".json"), spectrum_metadata(r.spectrum));
        const RealVector n = r.spectrum.normalized();
        series.push_back({r.method, std::vector<double>(r.spectrum.frequencies.data(),
                                                        r.spectrum.frequencies.data() + r.spectrum.frequencies.size()),
                          std::vector<double>(n.data(), n.data() + n.size())});
    }
    if (cfg.wants("json")) write_json(dir / "report.json", report.to_json());
    if (cfg.wants("svg")) {
        // the emission band; the far tail up to omega_max is flat
        for (auto& s : series) {
            std::vector<double> x, y;
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (s.x[i] <= 3.0 * cfg.model.omega0) {
                    x.push_back(s.x[i]);
                    y.push_back(s.y[i]);
                }
            s.x = std::move(x);
            s.y = std::move(y);
        }
        PlotSpec ps;
        ps.title = report.name;
        ps.x_label = "omega / omega0";
        ps.y_label = "N(omega) / max";
        write_text(dir / "spectra.svg", render_svg(series, ps));
    }
    write_text(dir / "config.toml", serialize_config(cfg));
}

ComparisonReport compare_directory(const fs::path& dir) {
    std::vector<MethodResult> results;
    std::vector<std::string> methods;
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir)) {
            const std::string f = e.path().filename().string();
            if (f.rfind("spectrum-", 0) == 0 && e.path().extension() == ".csv")
                methods.push_back(f.substr(9, f.size() - 13));
        }
    std::sort(methods.begin(), methods.end());
    for (const auto& m : methods) {
        SpectrumResult s = read_spectrum_csv(dir / ("spectrum-" + m + ".csv"));
        s.method = m;
        results.push_back(summarize(m, std::move(s)));
    }
    if (results.empty()) throw ValidationError("no spectrum CSVs found in " + dir.string());
    return compare(dir.filename().string(), std::move(results));
}

} // namespace emspec
