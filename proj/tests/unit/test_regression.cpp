#include "common.hpp"

using namespace emspec;

namespace {

struct Fixture {
    SystemModel model = test::model(ModelKind::Rabi, 0.3, 5);
    BathSpec bath = test::bath(0.05, 100);
    TimeGrid grid{8.0, 0.1, 0.02};

    MethodSetup setup(MethodKind method) const {
        const Renormalization r = solve_renormalization(bath, 1.0);
        return make_setup(method, model, r,
                          fit_kernel(method == MethodKind::SNZE ? KernelKind::Bare : KernelKind::Transformed, bath, r));
    }
};

RealVector tone_spectrum(double omega, double t, const RealVector& w) {
    const double delta = 0.01;
    const int n = int(std::lround(t / delta)) + 1;
    CorrelationGrid cg{delta, Matrix::Zero(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) cg.values(i, j) = std::exp(I * omega * delta * double(i - j));
    return spectrum(cg, w, RealVector::Constant(w.size(), 2.0), t).values;
}

} // namespace

TEST_SUITE("regression") {

TEST_CASE("adjoint grid matches forward propagation") {
    Fixture f;
    for (MethodKind method : {MethodKind::PTNZE, MethodKind::SNZE, MethodKind::PTBRE}) {
        const MethodSetup s = f.setup(method);
        const auto traj = propagate_density(s, initial_density(f.model, {QubitState::Excited, 0}), f.grid);
        const Matrix g = correlation_matrix(s, traj, f.grid);
        double err = 0.0;
        for (int a : {0, 33, 79}) {
            const auto fw = propagate_two_time(s, traj, a, f.grid);
            for (std::size_t i = 0; i < fw.size(); ++i)
                err = std::max(err, std::abs(fw[i].correlation - g(a + int(i), a)));
        }
        CHECK(err < 1e-10);
        // strictly lower-triangular storage
        CHECK(std::abs(g(0, 5)) == 0.0);
    }
}

TEST_CASE("grid is independent of the worker count") {
    Fixture f;
    for (MethodKind method : {MethodKind::PTNZE, MethodKind::PTBRE}) {
        const MethodSetup s = f.setup(method);
        const Matrix rho0 = initial_density(f.model, {QubitState::Ground, 1});
        const CorrelationGrid a = build_grid(s, rho0, f.grid, 1);
        const CorrelationGrid b = build_grid(s, rho0, f.grid, 3);
        CHECK(test::max_abs(a.values - b.values) < 1e-13);
        CHECK(a.diagonal_defect() < 1e-10);
        CHECK(a.t_end() == doctest::Approx(8.0));
    }
}

TEST_CASE("pure tone spectrum") {
    const double t = 20.0;
    const RealVector w = RealVector::LinSpaced(81, 0.0, 2.0);
    const RealVector n = tone_spectrum(1.0, t, w);
    Eigen::Index peak;
    n.maxCoeff(&peak);
    CHECK(w(peak) == doctest::Approx(1.0));
    CHECK(n(peak) == doctest::Approx(t * t).epsilon(1e-6));
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double d = w(k) - 1.0;
        const double exact = std::abs(d) < 1e-12 ? t * t : std::pow(std::sin(d * t / 2) / (d / 2), 2);
        CHECK(std::abs(n(k) - exact) < 1e-3 * t * t);
    }
}

TEST_CASE("full square sum is real and agrees with the triangle") {
    Fixture f;
    const MethodSetup s = f.setup(MethodKind::PTNZE);
    const CorrelationGrid cg = build_grid(s, initial_density(f.model, {QubitState::Excited, 0}), f.grid);
    const DiscretizedBath b = discretize(f.bath);
    const SpectrumResult tri = spectrum(cg, b.omegas, b.couplings, f.grid.t_end);
    const Vector full = spectrum_full_sum(cg, b.omegas, b.couplings, f.grid.t_end);
    const double top = tri.values.cwiseAbs().maxCoeff();
    CHECK(full.imag().cwiseAbs().maxCoeff() < 1e-10 * top);
    CHECK((full.real() - tri.values).cwiseAbs().maxCoeff() < 1e-10 * top);
    CHECK(tri.imag_residue < 1e-10);
}

TEST_CASE("steady-state certificate") {
    Fixture f;
    f.grid.t_end = 40.0;
    const MethodSetup s = f.setup(MethodKind::PTNZE);
    const CorrelationGrid cg = build_grid(s, initial_density(f.model, {QubitState::Excited, 0}), f.grid);
    const DiscretizedBath b = discretize(f.bath);
    const SpectrumResult r = steady_state_spectrum(cg, b.omegas, b.couplings);
    CHECK(r.stability >= 0.0);
    CHECK(r.stable == (r.stability < 0.02));
    const SpectrumResult early = spectrum(cg, b.omegas, b.couplings, 30.0);
    CHECK(r.stability == doctest::Approx(relative_change(b.omegas, early.values, r.values)));
}

TEST_CASE("peak finder") {
    const RealVector w = RealVector::LinSpaced(401, 0.0, 2.0);
    RealVector y(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k)
        y(k) = std::exp(-std::pow((w(k) - 0.8) / 0.03, 2)) + 0.6 * std::exp(-std::pow((w(k) - 1.2) / 0.03, 2)) +
               0.02 * std::exp(-std::pow((w(k) - 1.6) / 0.03, 2));
    const auto p5 = find_peaks(w, y, 0.05);
    REQUIRE(p5.size() == 2);
    CHECK(p5[0].omega == doctest::Approx(0.8));
    CHECK(p5[1].omega == doctest::Approx(1.2));
    CHECK(find_peaks(w, y, 0.01).size() == 3);
    const auto top = dominant_peaks(find_peaks(w, y, 0.01), 1);
    REQUIRE(top.size() == 1);
    CHECK(top[0].omega == doctest::Approx(0.8));
}

TEST_CASE("normalized L1 distance") {
    const RealVector w = RealVector::LinSpaced(101, 0.0, 1.0);
    const RealVector a = (-(w.array() - 0.5).square() * 50.0).exp().matrix();
    const RealVector b = (-(w.array() - 0.6).square() * 50.0).exp().matrix();
    CHECK(normalized_l1_distance(w, a, a) == 0.0);
    CHECK(normalized_l1_distance(w, a, b) == doctest::Approx(normalized_l1_distance(w, b, a)));
    // insensitive to overall scale
    CHECK(normalized_l1_distance(w, a, 3.0 * a) < 1e-14);
    CHECK(normalized_l1_distance(w, a, b) > 0.1);
    CHECK(trapezoid(w, RealVector::Ones(101)) == doctest::Approx(1.0));
}

}
