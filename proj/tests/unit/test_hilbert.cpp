#include "common.hpp"

using namespace emspec;

TEST_SUITE("hilbert") {

TEST_CASE("Pauli algebra on the lifted space") {
    const int n = 5;
    const Matrix sx = sigma_x(n), sy = sigma_y(n), sz = sigma_z(n);
    CHECK(test::max_abs(commutator(sx, sy) - 2.0 * I * sz) < 1e-14);
    CHECK(test::max_abs(sx * sx - Matrix::Identity(2 * n, 2 * n)) < 1e-14);
    CHECK(test::max_abs(sigma_plus(n) - sigma_minus(n).adjoint()) == 0.0);
    CHECK(test::max_abs(sigma_plus(n) * sigma_minus(n) - 0.5 * (Matrix::Identity(2 * n, 2 * n) + sz)) < 1e-14);
}

TEST_CASE("cavity ladder below the truncation edge") {
    const int n = 6;
    const Matrix b = annihilation(n);
    const Matrix c = commutator(b, b.adjoint());
    // [b, b^dag] = 1 except on the last Fock level
    for (int q = 0; q < 2; ++q)
        for (int k = 0; k + 1 < n; ++k) CHECK(std::abs(c(q * n + k, q * n + k) - 1.0) < 1e-14);
    CHECK(test::max_abs(number(n) - b.adjoint() * b) < 1e-14);
}

TEST_CASE("Hamiltonians are Hermitian and carry their symmetry") {
    for (double eta : {1.0, 0.8}) {
        const Matrix hr = build_hamiltonian(test::model(ModelKind::Rabi, 0.6, 8), eta);
        const Matrix hj = build_hamiltonian(test::model(ModelKind::JC, 0.6, 8), eta);
        CHECK(hermiticity_defect(hr) < 1e-15);
        CHECK(hermiticity_defect(hj) < 1e-15);
        CHECK(test::max_abs(commutator(hr, parity(8))) < 1e-13);
        CHECK(test::max_abs(commutator(hj, parity(8))) < 1e-13);
    }
    // excitation number is conserved by JC at eta = 1 only
    const Matrix hj = build_hamiltonian(test::model(ModelKind::JC, 0.6, 8), 1.0);
    CHECK(test::max_abs(commutator(hj, excitation_number(8))) < 1e-13);
    const Matrix hr = build_hamiltonian(test::model(ModelKind::Rabi, 0.6, 8), 1.0);
    CHECK(test::max_abs(commutator(hr, excitation_number(8))) > 1e-2);
}

TEST_CASE("vacuum Rabi splitting of the resonant JC model") {
    const double lambda = 0.3;
    const auto e = dressed_spectrum(build_hamiltonian(test::model(ModelKind::JC, lambda, 8))).energies;
    // ground -1/2, one-excitation doublet 1/2 +- lambda/2
    CHECK(e(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(e(1) == doctest::Approx(0.5 - lambda / 2).epsilon(1e-12));
    CHECK(e(2) == doctest::Approx(0.5 + lambda / 2).epsilon(1e-12));
}

TEST_CASE("dressed gaps are sorted and positive") {
    const auto g = dressed_spectrum(build_hamiltonian(test::model(ModelKind::Rabi, 0.3, 5))).gaps();
    CHECK(g.size() == 45);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(g.front() >= 0.0);
}

TEST_CASE("jump operators") {
    const auto r = jump_operators(test::model(ModelKind::Rabi, 0.3));
    CHECK(test::max_abs(r.lowering - sigma_minus(6)) == 0.0);
    const auto j = jump_operators(test::model(ModelKind::JC, 0.3));
    CHECK(test::max_abs(j.raising - j.lowering.adjoint()) == 0.0);
    CHECK(test::max_abs(j.lowering - sigma_minus(6)) > 0.0);
}

TEST_CASE("initial states") {
    const SystemModel m = test::model(ModelKind::Rabi, 0.3, 4);
    const Matrix rho = initial_density(m, {QubitState::Ground, 1});
    CHECK(std::abs(rho.trace() - 1.0) < 1e-15);
    CHECK(std::abs((sigma_z(4) * rho).trace() + 1.0) < 1e-15);
    CHECK(std::abs((number(4) * rho).trace() - 1.0) < 1e-15);
    const Vector plus = initial_ket(m, {QubitState::Plus, 0});
    CHECK(std::abs(plus.dot(sigma_x(4) * plus) - 1.0) < 1e-15);
    CHECK_THROWS_AS(initial_density(m, {QubitState::Excited, 4}), ValidationError);
}

TEST_CASE("invalid models") {
    SystemModel m = test::model(ModelKind::Rabi, -0.1);
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = test::model(ModelKind::Rabi, 0.1, 0);
    CHECK_THROWS_AS(m.validate(), ValidationError);
    CHECK_THROWS_AS(build_hamiltonian(test::model(ModelKind::Rabi, 0.1), 1.5), ValidationError);
}

}
