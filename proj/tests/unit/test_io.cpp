#include "common.hpp"

#include <fstream>
#include <sstream>

using namespace emspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("emspec-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig tiny_config(const fs::path& dir) {
    ExperimentConfig c;
    c.name = "tiny";
    c.methods = {"PTNZE", "multiD1"};
    c.model.lambda_c = 0.3;
    c.model.n_cavity = 4;
    c.bath.alpha = 0.05;
    c.bath.n_modes = 30;
    c.times = {4.0, 0.02, 0.1};
    c.davydov.multiplicity = 2;
    c.davydov.dt = 0.05;
    c.davydov.seed = 3;
    c.outputs.directory = dir.string();
    return c;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("spectrum CSV round trip is exact") {
    SpectrumResult s;
    s.frequencies = RealVector::LinSpaced(7, 0.1, 1.9);
    s.values = RealVector::Random(7);
    const fs::path p = scratch("csv") / "s.csv";
    write_spectrum_csv(p, s);
    const SpectrumResult back = read_spectrum_csv(p);
    CHECK(back.frequencies == s.frequencies);
    CHECK(back.values == s.values);
    CHECK(slurp(p).rfind("omega,N,normalized\n", 0) == 0);
}

TEST_CASE("fit JSON round trip") {
    ExponentialFit f;
    f.terms = {{{0.1, -0.2}, {1.5, 3.0}}, {{1e-3, 0.0}, {0.25, 0.0}}};
    f.max_abs_error = 1e-5;
    f.window = 4.0;
    const ExponentialFit back = fit_from_json(to_json(f));
    REQUIRE(back.size() == 2);
    CHECK(back.terms[0].g == f.terms[0].g);
    CHECK(back.terms[1].gamma == f.terms[1].gamma);
    CHECK(back.window == f.window);
}

TEST_CASE("fit cache hits on the second lookup") {
    const fs::path dir = scratch("cache");
    const BathSpec b = test::bath(0.05);
    const Renormalization r = solve_renormalization(b, 1.0);
    FitCache cache(dir);
    bool hit = true;
    const ExponentialFit a = cache.get(KernelKind::Transformed, b, r, {}, &hit);
    CHECK_FALSE(hit);
    const ExponentialFit c = cache.get(KernelKind::Transformed, b, r, {}, &hit);
    CHECK(hit);
    CHECK(a.terms.size() == c.terms.size());
    CHECK(a(0.3) == c(0.3));
    BathSpec other = b;
    other.alpha = 0.06;
    CHECK(cache.path_for(KernelKind::Transformed, b, r, {}) != cache.path_for(KernelKind::Transformed, other, r, {}));
}

TEST_CASE("trajectory checkpoint round trip") {
    const SystemModel m = test::model(ModelKind::JC, 0.3, 3);
    const MethodSetup s = make_setup(MethodKind::PTBRE, m, Renormalization{}, ExponentialFit{});
    const auto traj = propagate_density(s, initial_density(m, {QubitState::Excited, 0}), TimeGrid{1.0, 0.1, 0.01});
    const DensityTrajectory back = trajectory_from_json(read_json([&] {
        const fs::path p = scratch("ckpt") / "t.json";
        write_json(p, to_json(traj));
        return p;
    }()));
    REQUIRE(back.samples.size() == traj.samples.size());
    CHECK(back.method == MethodKind::PTBRE);
    CHECK(back.reconstructed);
    CHECK(back.samples.back().rho == traj.samples.back().rho);
    Json bad = to_json(traj);
    bad["version"] = kCheckpointVersion + 1;
    CHECK_THROWS_AS(trajectory_from_json(bad), ValidationError);
}

TEST_CASE("SVG writer") {
    PlotSpec ps;
    ps.title = "t";
    ps.log_y = true;
    ps.reference_y = 1e-2;
    const std::string svg = render_svg({{"a", {0.0, 1.0, 2.0}, {1e-3, 1e-2, 1e-1}}}, ps);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("validity outputs") {
    const fs::path dir = scratch("validity");
    const auto rows = run_validity_curve({0.0, 0.04, 0.2}, 5.0, 1.0);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].bare == 0.0);
    CHECK(rows[0].transformed == 0.0);
    CHECK(rows[1].bare == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(rows[2].transformed < 1e-2);
    write_validity(dir, rows, 5.0);
    CHECK(fs::exists(dir / "validity.csv"));
    CHECK(fs::exists(dir / "validity.svg"));
    CHECK_THROWS_AS(run_validity_curve({0.6}, 5.0, 1.0), ValidationError);
}

TEST_CASE("reruns write byte-identical outputs") {
    const fs::path d1 = scratch("rerun1"), d2 = scratch("rerun2");
    const ExperimentConfig c = tiny_config(d1);
    write_outputs(c, run_spectrum(c), d1);
    write_outputs(c, run_spectrum(c), d2);
    for (const char* f : {"spectrum-PTNZE.csv", "spectrum-multiD1.csv", "trajectory-multiD1.csv"}) {
        CAPTURE(f);
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    const ComparisonReport rep = compare_directory(d1);
    REQUIRE(rep.results.size() == 2);
    CHECK(rep.distance("PTNZE", "PTNZE") == 0.0);
    CHECK(rep.distance("PTNZE", "multiD1") == rep.distance("multiD1", "PTNZE"));
    CHECK(rep.to_json().contains("l1_distances"));
}

}
