#include "common.hpp"

using namespace emspec;

TEST_SUITE("fit") {

TEST_CASE("recovers a known exponential sum") {
    const std::vector<ExpTerm> truth{{{1.0, 0.0}, {0.3, 1.0}}, {{0.5, 0.2}, {1.2, -3.0}}};
    const double dt = 0.01;
    Vector y(600);
    for (Eigen::Index n = 0; n < y.size(); ++n) {
        y(n) = 0.0;
        for (const auto& t : truth) y(n) += t.g * std::exp(-t.gamma * (dt * double(n)));
    }
    const ExponentialFit fit = fit_exponentials(y, dt, 6, 1e-10);
    REQUIRE(fit.size() == 2);
    for (const auto& t : truth) {
        double best = 1e9;
        for (const auto& f : fit.terms)
            if (std::abs(f.gamma - t.gamma) < best) best = std::abs(f.gamma - t.gamma);
        CHECK(best < 1e-8);
    }
    CHECK(fit.max_abs_error <= 1e-10);
    CHECK(std::abs(fit(2.0) - y(200)) < 1e-9);
}

TEST_CASE("uses the fewest terms within tolerance") {
    Vector y(300);
    for (Eigen::Index n = 0; n < y.size(); ++n) y(n) = std::exp(-0.5 * 0.02 * double(n));
    CHECK(fit_exponentials(y, 0.02, 8, 1e-10).size() == 1);
}

TEST_CASE("kernel fits stay within tolerance with few terms") {
    for (double alpha : {0.02, 0.1, 0.2}) {
        const BathSpec b = test::bath(alpha);
        const Renormalization r = solve_renormalization(b, 1.0);
        for (KernelKind k : {KernelKind::Bare, KernelKind::Transformed}) {
            const ExponentialFit fit = fit_kernel(k, b, r);
            const double c0 = std::abs(k == KernelKind::Bare ? correlation_bare(b, 0.0)
                                                              : correlation_transformed(b, r, 0.0));
            CHECK(fit.size() <= 8);
            CHECK(fit.max_abs_error <= 1e-3 * c0);
            for (const auto& t : fit.terms) CHECK(t.gamma.real() > 0.0);
            // off-sample check against the closed form
            if (k == KernelKind::Bare)
                for (double t : {0.013, 0.77, 3.1}) CHECK(std::abs(fit(t) - correlation_bare(b, t)) <= 1e-3 * c0);
        }
    }
}

TEST_CASE("zero coupling gives an empty fit") {
    const BathSpec b = test::bath(0.0);
    const ExponentialFit fit = fit_kernel(KernelKind::Bare, b, Renormalization{});
    CHECK(std::abs(fit(1.0)) == 0.0);
}

}
