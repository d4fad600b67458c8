#include "common.hpp"

using namespace emspec;

TEST_SUITE("davydov") {

TEST_CASE("initialization reproduces the product state") {
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 4);
    const DiscretizedBath b = discretize(test::bath(0.05, 20));
    const DavydovState s = initialize(m, b, {QubitState::Excited, 0}, 4, 1e-3, 5);
    CHECK(s.parameter_count() == std::size_t(2 * 4 * (20 + 4)));
    CHECK(norm2(s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(expectation(s, sigma_z(4)).real() == doctest::Approx(1.0).epsilon(1e-14));
    // slot 0 starts in the reservoir vacuum
    CHECK(s.f.row(0).norm() == 0.0);
    CHECK(s.g.row(0).norm() == 0.0);
    // the noise is seeded
    const DavydovState t = initialize(m, b, {QubitState::Excited, 0}, 4, 1e-3, 5);
    CHECK(s.f == t.f);
    const DavydovState u = initialize(m, b, {QubitState::Excited, 0}, 4, 1e-3, 6);
    CHECK(s.f != u.f);
}

TEST_CASE("sigma_x flips the sign of the minus branch") {
    const SystemModel m = test::model(ModelKind::JC, 0.3, 4);
    const DiscretizedBath b = discretize(test::bath(0.05, 10));
    const DavydovState s = initialize(m, b, {QubitState::Ground, 1}, 2, 1e-3, 0);
    const DavydovState x = apply_sigma_x(s);
    CHECK(std::abs(transition_element(s, x, Matrix::Identity(8, 8)) - expectation(s, sigma_x(4))) < 1e-14);
    CHECK(std::abs(expectation(x, sigma_z(4)) + expectation(s, sigma_z(4))) < 1e-14);
}

TEST_CASE("closed system matches exact evolution") {
    const SystemModel m = test::model(ModelKind::JC, 0.3, 5);
    const DiscretizedBath b = discretize(test::bath(0.0, 4));
    DavydovState s = initialize(m, b, {QubitState::Excited, 0}, 2, 1e-3, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(build_hamiltonian(m));
    const Vector psi0 = initial_ket(m, {QubitState::Excited, 0});
    for (int i = 0; i < 1000; ++i) s = step(s, m, b, 0.01);
    const Vector ph = (-I * s.t * es.eigenvalues().cast<Complex>()).array().exp().matrix();
    const Vector psi = es.eigenvectors() * ph.cwiseProduct(es.eigenvectors().adjoint() * psi0);
    CHECK(std::abs(expectation(s, sigma_z(5)).real() - psi.dot(sigma_z(5) * psi).real()) < 1e-8);
    CHECK(norm2(s) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reduced and full equation solves agree") {
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 4);
    const DiscretizedBath b = discretize(test::bath(0.05, 12));
    DavydovState s = initialize(m, b, {QubitState::Excited, 0}, 3, 1e-3, 2);
    for (int i = 0; i < 20; ++i) s = step(s, m, b, 0.05);
    const auto r = solve_eom(s, m, b, s.t), f = solve_eom_full(s, m, b, s.t);
    CHECK(test::max_abs(r.dA - f.dA) < 1e-6);
    CHECK(test::max_abs(r.df - f.df) < 1e-6);
    const auto d = deviation(r, s.t, m.omega0);
    CHECK(d.sigma2 >= 0.0);
    CHECK(d.degraded == (d.sigma2 >= 1e-2));
}

TEST_CASE("small reservoir against dense evolution") {
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 4);
    const DiscretizedBath b = discretize(test::bath(0.05, 3));
    const auto oracle = exact_small_oracle(m, b, 4, {QubitState::Excited, 0}, 10.0, 0.5);
    DavydovState s = initialize(m, b, {QubitState::Excited, 0}, 6, 1e-3, 0);
    double err = 0.0;
    for (std::size_t i = 0; i < oracle.times.size(); ++i) {
        err = std::max(err, std::abs(expectation(s, sigma_z(4)).real() - oracle.sigma_z[i]));
        for (int k = 0; k < 50; ++k) s = step(s, m, b, 0.01);
    }
    CHECK(err < 1e-2);
    // the oracle conserves the photon budget of its own Hilbert space
    CHECK(oracle.photons.size() == oracle.times.size());
}

TEST_CASE("runs are deterministic and produce a spectrum") {
    const SystemModel m = test::model(ModelKind::JC, 0.3, 4);
    const DiscretizedBath b = discretize(test::bath(0.05, 40));
    DavydovOptions o;
    o.multiplicity = 2;
    o.noise = 1e-3;
    o.dt = 0.05;
    o.t_end = 4.0;
    const DavydovRun a = run_davydov(m, b, {QubitState::Excited, 0}, o);
    const DavydovRun c = run_davydov(m, b, {QubitState::Excited, 0}, o);
    CHECK(a.spectrum.values == c.spectrum.values);
    CHECK(a.samples.size() == 41);
    CHECK(a.spectrum.values.minCoeff() >= 0.0);
    CHECK(a.early_spectrum.t_final == doctest::Approx(3.0));
    // energy leaves the qubit into the reservoir
    CHECK(a.samples.back().emitted > 0.0);
    CHECK(a.samples.back().norm == doctest::Approx(1.0).epsilon(1e-3));
}

}
