#include "common.hpp"

using namespace emspec;

TEST_SUITE("bath") {

TEST_CASE("closed-form correlation") {
    const BathSpec b = test::bath(0.04);
    CHECK(std::abs(correlation_bare(b, 0.0) - Complex(0.02 * 25.0, 0.0)) < 1e-14);
    // C(-t) = conj C(t)
    CHECK(std::abs(correlation_bare(b, -0.7) - std::conj(correlation_bare(b, 0.7))) < 1e-15);
    CHECK(std::abs(correlation_bare(test::bath(0.0), 1.0)) == 0.0);
}

TEST_CASE("quadrature reproduces the closed form") {
    const BathSpec b = test::bath(0.1);
    for (double t : {0.0, 0.1, 0.5, 2.0, 10.0}) {
        const Complex q = spectral_integral(b, [](double) { return 0.25; }, t, 1e-10);
        CHECK(std::abs(q - correlation_bare(b, t)) <= 1e-8 * std::abs(correlation_bare(b, t)));
    }
}

TEST_CASE("log discretization") {
    const BathSpec b = test::bath(0.05, 500);
    const DiscretizedBath d = discretize(b);
    REQUIRE(d.size() == 500);
    CHECK(d.omegas(499) == b.omega_max);
    for (Eigen::Index k = 1; k < d.size(); ++k) CHECK(d.omegas(k) > d.omegas(k - 1));
    // sum lambda^2 / 4 tends to the truncated continuum integral
    const double x = b.omega_max / b.omega_cut;
    const double cont = 0.5 * b.alpha * b.omega_cut * b.omega_cut * (1.0 - std::exp(-x) * (1.0 + x));
    CHECK(std::abs(d.correlation(0.0).real() - cont) / cont < 1e-2);
    CHECK(std::abs(d.correlation(0.0).imag()) < 1e-15);
}

TEST_CASE("discrete correlation approaches the truncated continuum at short times") {
    const BathSpec b = test::bath(0.05, 2000);
    const DiscretizedBath d = discretize(b);
    const double c0 = std::abs(correlation_bare(b, 0.0));
    for (double t : {0.2, 1.0, 3.0}) {
        // C(t) minus the analytic tail above omega_max
        const Complex sr = 1.0 / b.omega_cut + I * t;
        const Complex tail = 0.5 * b.alpha * std::exp(-b.omega_max * sr) * (b.omega_max / sr + 1.0 / (sr * sr));
        const Complex ref = correlation_bare(b, t) - tail;
        CHECK(std::abs(d.correlation(t) - ref) < 2e-3 * c0);
    }
}

TEST_CASE("renormalization fixed point") {
    for (double alpha : {0.0, 0.02, 0.1, 0.3}) {
        const BathSpec b = test::bath(alpha);
        const Renormalization r = solve_renormalization(b, 1.0);
        CHECK(r.converged);
        CHECK(r.eta > 0.0);
        CHECK(r.eta <= 1.0);
        CHECK(std::abs(r.eta - eta_map(b, 1.0, r.eta)) < 1e-12);
        CHECK(std::abs(r.eta - solve_eta_bisection(b, 1.0)) < 1e-10);
    }
    CHECK(solve_renormalization(test::bath(0.0), 1.0).eta == 1.0);
    // stronger dissipation renormalizes the qubit more
    CHECK(solve_renormalization(test::bath(0.2), 1.0).eta < solve_renormalization(test::bath(0.05), 1.0).eta);
}

TEST_CASE("discrete renormalization approaches the continuum") {
    const BathSpec b = test::bath(0.1, 3000);
    const DiscretizedBath d = discretize(b);
    const Renormalization r = solve_renormalization(b, 1.0, &d);
    CHECK_FALSE(r.continuum);
    CHECK(r.xi.size() == 3000);
    CHECK(std::abs(r.eta - solve_renormalization(b, 1.0).eta) < 2e-3);
    // dressed couplings are weaker, and untouched far below eta w0
    for (Eigen::Index k = 0; k < d.size(); ++k) CHECK(r.lambda_tilde(k) <= d.couplings(k));
    CHECK(r.lambda_tilde(0) / d.couplings(0) > 0.99);
    CHECK(r.lambda_tilde(d.size() - 1) / d.couplings(d.size() - 1) < 0.1);
}

TEST_CASE("transformed kernel is much smaller than the bare one") {
    for (double alpha : {0.05, 0.2}) {
        const BathSpec b = test::bath(alpha);
        const Renormalization r = solve_renormalization(b, 1.0);
        CHECK(std::abs(correlation_transformed(b, r, 0.0)) < 0.25 * std::abs(correlation_bare(b, 0.0)));
        const auto v = validity_metrics(b, 1.0);
        CHECK(v.c0_bare_scaled == doctest::Approx(alpha / 2).epsilon(1e-12));
    }
    const auto v = validity_metrics(test::bath(0.2), 1.0);
    CHECK(v.c0_transformed_scaled < 1e-2);
}

TEST_CASE("invalid baths") {
    CHECK_THROWS_AS(discretize(test::bath(-0.1)), ValidationError);
    CHECK_THROWS_AS(discretize(test::bath(0.1, 0)), ValidationError);
    BathSpec b = test::bath(0.1);
    b.omega_max = 1.0;
    CHECK_THROWS_AS(b.validate(), ValidationError);
    CHECK_THROWS_AS(spectral_density(test::bath(0.1), -1.0), ValidationError);
}

}
