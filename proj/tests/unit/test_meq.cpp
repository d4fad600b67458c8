#include "common.hpp"

using namespace emspec;

namespace {

const MethodKind kMethods[] = {MethodKind::PTNZE, MethodKind::SNZE, MethodKind::PTBRE};

MethodSetup setup_for(MethodKind method, const SystemModel& m, const BathSpec& b) {
    const Renormalization r = solve_renormalization(b, 1.0);
    const ExponentialFit fit = fit_kernel(method == MethodKind::SNZE ? KernelKind::Bare : KernelKind::Transformed, b, r);
    return make_setup(method, m, r, fit);
}

} // namespace

TEST_SUITE("meq") {

TEST_CASE("method names round-trip") {
    for (MethodKind k : kMethods) CHECK(method_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(method_from_string("Lindblad"), ValidationError);
}

TEST_CASE("time grid") {
    const TimeGrid g{10.0, 0.1, 0.03};
    CHECK(g.samples() == 101);
    CHECK(g.substeps() == 4);
    CHECK(g.step() == doctest::Approx(0.025));
    CHECK_THROWS_AS((TimeGrid{10.0, 0.0, 0.01}.validate()), ValidationError);
    CHECK_THROWS_AS((TimeGrid{-1.0, 0.1, 0.01}.validate()), ValidationError);
}

TEST_CASE("closed system follows the exact unitary evolution") {
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 6);
    const Matrix h = build_hamiltonian(m);
    const Matrix rho0 = initial_density(m, {QubitState::Excited, 0});
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (MethodKind method : kMethods) {
        const MethodSetup s = make_setup(method, m, Renormalization{}, ExponentialFit{});
        const auto traj = propagate_density(s, rho0, TimeGrid{10.0, 0.1, 0.01});
        REQUIRE(traj.samples.size() == 101);
        const double t = traj.samples.back().t;
        const Vector ph = (-I * t * es.eigenvalues().cast<Complex>()).array().exp().matrix();
        const Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        CHECK(test::max_abs(traj.samples.back().rho - u * rho0 * u.adjoint()) < 1e-8);
        CHECK(traj.reconstructed == (method == MethodKind::PTBRE));
    }
}

TEST_CASE("dissipative runs keep trace and Hermiticity") {
    const BathSpec b = test::bath(0.1);
    for (ModelKind k : {ModelKind::Rabi, ModelKind::JC})
        for (MethodKind method : kMethods) {
            const SystemModel m = test::model(k, 0.6, 6);
            const auto traj =
                propagate_density(setup_for(method, m, b), initial_density(m, {QubitState::Ground, 1}), TimeGrid{20.0, 0.1, 0.02});
            double tr = 0.0, herm = 0.0;
            for (const auto& s : traj.samples) {
                tr = std::max(tr, std::abs(s.rho.trace() - 1.0));
                herm = std::max(herm, hermiticity_defect(s.rho));
            }
            CHECK(tr < 1e-10);
            CHECK(herm < 1e-12);
        }
}

TEST_CASE("weak coupling reproduces the golden-rule decay") {
    // bare qubit: the cavity is decoupled at lambda = 0
    const double alpha = 0.01;
    const BathSpec b = test::bath(alpha);
    const SystemModel m = test::model(ModelKind::Rabi, 0.0, 2);
    const auto traj = propagate_density(setup_for(MethodKind::SNZE, m, b), initial_density(m, {QubitState::Excited, 0}),
                                        TimeGrid{30.0, 0.1, 0.02});
    const double gamma = 0.5 * M_PI * spectral_density(b, 1.0);
    const auto& last = traj.samples.back();
    const double pe = 0.5 * (1.0 + (sigma_z(2) * last.rho).trace().real());
    const double est = -std::log(pe) / last.t;
    CHECK(est == doctest::Approx(gamma).epsilon(0.05));
}

TEST_CASE("relaxation goes toward the ground state") {
    const BathSpec b = test::bath(0.05);
    for (MethodKind method : kMethods) {
        const SystemModel m = test::model(ModelKind::JC, 0.3, 5);
        const auto traj = propagate_density(setup_for(method, m, b), initial_density(m, {QubitState::Excited, 0}),
                                            TimeGrid{60.0, 0.1, 0.02});
        const double sz = (sigma_z(5) * traj.samples.back().rho).trace().real();
        CHECK(sz < -0.8);
    }
}

TEST_CASE("two-time propagation starts from sigma_x rho") {
    const BathSpec b = test::bath(0.05);
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 5);
    const MethodSetup s = setup_for(MethodKind::PTNZE, m, b);
    const TimeGrid g{5.0, 0.1, 0.02};
    const auto traj = propagate_density(s, initial_density(m, {QubitState::Excited, 0}), g);
    const auto two = propagate_two_time(s, traj, 20, g);
    REQUIRE(two.size() == 31);
    // G(t', t') = <sigma_x^2> = 1
    CHECK(std::abs(two.front().correlation - 1.0) < 1e-12);
    CHECK(two.front().t_prime == doctest::Approx(2.0));
    CHECK_THROWS_AS(propagate_two_time(s, traj, 51, g), ValidationError);
}

TEST_CASE("non-finite input is rejected") {
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 3);
    const MethodSetup s = make_setup(MethodKind::PTNZE, m, Renormalization{}, ExponentialFit{});
    Matrix rho = initial_density(m, {QubitState::Excited, 0});
    rho(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(propagate_density(s, rho, TimeGrid{1.0, 0.1, 0.01}));
}

}
