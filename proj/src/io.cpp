#include "emspec/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace emspec {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from(const Json& j) {
    const auto n = Eigen::Index(j.size());
    const auto c = n ? Eigen::Index(j.at(0).size()) : 0;
    Matrix m(n, c);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < c; ++k) {
            const auto& e = j.at(std::size_t(i)).at(std::size_t(k));
            m(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return m;
}

const char* kernel_name(KernelKind k) { return k == KernelKind::Bare ? "bare" : "transformed"; }

} // namespace

void write_spectrum_csv(const fs::path& path, const SpectrumResult& s) {
    auto os = open_out(path);
    const RealVector n = s.normalized();
    os << "omega,N,normalized\n";
    for (Eigen::Index k = 0; k < s.frequencies.size(); ++k)
        os << num(s.frequencies(k)) << ',' << num(s.values(k)) << ',' << num(n(k)) << '\n';
    finish(os, path);
}

Json spectrum_metadata(const SpectrumResult& s) {
    Json j;
    j["method"] = s.method;
    j["t_final"] = s.t_final;
    j["imag_residue"] = s.imag_residue;
    j["stability"] = s.stability;
    j["stable"] = s.stable;
    j["points"] = s.frequencies.size();
    Json meta = Json::object();
    for (const auto& [k, v] : s.metadata) meta[k] = v;
    j["metadata"] = meta;
    return j;
}

SpectrumResult read_spectrum_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    if (line != "omega,N,normalized") throw ValidationError("not a spectrum CSV: " + path.string());
    std::vector<double> w, v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        w.push_back(std::stod(a));
        v.push_back(std::stod(b));
    }
    SpectrumResult s;
    s.frequencies = Eigen::Map<RealVector>(w.data(), Eigen::Index(w.size()));
    s.values = Eigen::Map<RealVector>(v.data(), Eigen::Index(v.size()));
    return s;
}

void write_davydov_csv(const fs::path& path, const std::vector<DavydovSample>& samples) {
    auto os = open_out(path);
    os << "t,sigma_z,sigma_x,norm,sigma2\n";
    for (const auto& s : samples)
        os << num(s.t) << ',' << num(s.sigma_z) << ',' << num(s.sigma_x) << ',' << num(s.norm) << ','
           << num(s.sigma2) << '\n';
    finish(os, path);
}

Json to_json(const ExponentialFit& fit) {
    Json terms = Json::array();
    for (const auto& t : fit.terms)
        terms.push_back({{"g_re", t.g.real()}, {"g_im", t.g.imag()}, {"gamma_re", t.gamma.real()},
                         {"gamma_im", t.gamma.imag()}});
    return {{"terms", terms}, {"max_abs_error", fit.max_abs_error}, {"window", fit.window}};
}

ExponentialFit fit_from_json(const Json& j) {
    ExponentialFit fit;
    for (const auto& t : j.at("terms"))
        fit.terms.push_back({Complex(t.at("g_re").get<double>(), t.at("g_im").get<double>()),
                             Complex(t.at("gamma_re").get<double>(), t.at("gamma_im").get<double>())});
    fit.max_abs_error = j.at("max_abs_error").get<double>();
    fit.window = j.at("window").get<double>();
    return fit;
}

fs::path FitCache::path_for(KernelKind kind, const BathSpec& spec, const Renormalization& renorm,
                            const KernelFitOptions& opt) const {
    // %a keeps the key exact; the hash keeps file names short
    char key[512];
    std::snprintf(key, sizeof key, "%s|%a|%a|%a|%a|%d|%a|%a|%a", kernel_name(kind), spec.alpha, spec.omega_cut,
                  renorm.omega0, renorm.eta, opt.max_terms, opt.window_cutoffs, opt.step_cutoffs,
                  opt.rel_tolerance);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (const char* c = key; *c; ++c) h = (h ^ std::uint64_t(static_cast<unsigned char>(*c))) * 1099511628211ull;
    char name[96];
    std::snprintf(name, sizeof name, "fit-%s-a%.4g-%016llx.json", kernel_name(kind), spec.alpha,
                  static_cast<unsigned long long>(h));
    return dir_ / name;
}

ExponentialFit FitCache::get(KernelKind kind, const BathSpec& spec, const Renormalization& renorm,
                             const KernelFitOptions& opt, bool* hit) const {
    const fs::path p = path_for(kind, spec, renorm, opt);
    if (fs::exists(p)) {
        try {
            auto fit = fit_from_json(read_json(p));
            if (hit) *hit = true;
            return fit;
        } catch (const Json::exception&) {
            // unreadable cache entry: refit and overwrite
        }
    }
    auto fit = fit_kernel(kind, spec, renorm, opt);
    write_json(p, to_json(fit));
    if (hit) *hit = false;
    return fit;
}

Json to_json(const DensityTrajectory& traj) {
    Json samples = Json::array();
    for (const auto& s : traj.samples) {
        Json aux = Json::array();
        for (const auto& a : s.aux) aux.push_back(matrix_json(a));
        samples.push_back({{"t", s.t}, {"rho", matrix_json(s.rho)}, {"aux", aux}});
    }
    return {{"format", "emspec-trajectory"},
            {"version", kCheckpointVersion},
            {"method", to_string(traj.method)},
            {"reconstructed", traj.reconstructed},
            {"delta", traj.delta},
            {"samples", samples}};
}

DensityTrajectory trajectory_from_json(const Json& j) {
    if (j.value("format", "") != "emspec-trajectory") throw ValidationError("not a trajectory checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
        throw ValidationError("unsupported checkpoint version " + std::to_string(version));
    DensityTrajectory traj;
    traj.method = method_from_string(j.at("method").get<std::string>());
    traj.reconstructed = j.at("reconstructed").get<bool>();
    traj.delta = j.at("delta").get<double>();
    for (const auto& s : j.at("samples")) {
        DensityState st;
        st.t = s.at("t").get<double>();
        st.rho = matrix_from(s.at("rho"));
        for (const auto& a : s.at("aux")) st.aux.push_back(matrix_from(a));
        traj.samples.push_back(std::move(st));
    }
    return traj;
}

void write_json(const fs::path& path, const Json& j) {
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    finish(os, path);
}

Json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return Json::parse(is);
}

void write_text(const fs::path& path, const std::string& text) {
    auto os = open_out(path);
    os << text;
    finish(os, path);
}

std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
    constexpr double W = 720, H = 450, L = 80, R = 170, T = 40, B = 60;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    auto ty = [&](double y) { return spec.log_y ? std::log10(std::max(y, 1e-300)) : y; };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_y && s.y[i] <= 0.0) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (spec.reference_y) {
        y0 = std::min(y0, ty(*spec.reference_y));
        y1 = std::max(y1, ty(*spec.reference_y));
    }
    if (x0 > x1) x0 = 0, x1 = 1;
    if (y0 > y1) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << spec.title
       << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        const double ylab = spec.log_y ? std::pow(10.0, yv) : yv;
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << num(xv).substr(0, 6)
           << "</text>\n";
        const double yp = H - B - (yv - y0) / (y1 - y0) * (H - T - B);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", ylab);
        os << "<text x=\"" << L - 6 << "\" y=\"" << yp + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << spec.x_label
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (T + H - B) / 2 << ")\">" << spec.y_label << "</text>\n";
    if (spec.reference_y) {
        const double y = py(*spec.reference_y);
        os << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << W - R << "\" y2=\"" << y
           << "\" stroke=\"grey\" stroke-dasharray=\"6 4\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % (sizeof colors / sizeof *colors)];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_y && s.y[i] <= 0.0) continue;
            os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        os << "\"/>\n";
        const double ly = T + 16 + 18 * double(k);
        os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
           << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace emspec
