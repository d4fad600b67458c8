#include "emspec/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace emspec {

namespace {

Matrix kron(const Eigen::Matrix2cd& q, const Matrix& c) {
    const Eigen::Index n = c.rows();
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (q(i, j) != Complex(0.0)) out.block(i * n, j * n, n, n) = q(i, j) * c;
    return out;
}

Matrix lift_qubit(const Eigen::Matrix2cd& q, int n) { return kron(q, Matrix::Identity(n, n)); }

Matrix lift_cavity(const Matrix& c) { return kron(Eigen::Matrix2cd::Identity(), c); }

Matrix cavity_b(int n) {
    Matrix b = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) b(k - 1, k) = std::sqrt(double(k));
    return b;
}

void check_cavity(int n) {
    if (n < 2) throw ValidationError("n_cavity must be >= 2");
}

} // namespace

void SystemModel::validate() const {
    if (!(omega0 > 0.0)) throw ValidationError("omega0 must be positive");
    if (!(omega_c > 0.0)) throw ValidationError("omega_c must be positive");
    if (!(lambda_c >= 0.0)) throw ValidationError("lambda_c must be non-negative");
    check_cavity(n_cavity);
}

Matrix sigma_x(int n) {
    Eigen::Matrix2cd q;
    q << 0, 1, 1, 0;
    return lift_qubit(q, n);
}

Matrix sigma_y(int n) {
    Eigen::Matrix2cd q;
    q << 0, -I, I, 0;
    return lift_qubit(q, n);
}

Matrix sigma_z(int n) {
    Eigen::Matrix2cd q;
    q << 1, 0, 0, -1;
    return lift_qubit(q, n);
}

Matrix sigma_plus(int n) {
    Eigen::Matrix2cd q;
    q << 0, 1, 0, 0;
    return lift_qubit(q, n);
}

Matrix sigma_minus(int n) { return sigma_plus(n).adjoint(); }

Matrix annihilation(int n) { return lift_cavity(cavity_b(n)); }

Matrix number(int n) {
    Matrix c = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) c(k, k) = double(k);
    return lift_cavity(c);
}

Matrix excitation_number(int n) { return sigma_plus(n) * sigma_minus(n) + number(n); }

Matrix parity(int n) {
    Matrix c = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) c(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return sigma_z(n) * lift_cavity(c);
}

Matrix build_hamiltonian(const SystemModel& model, double eta) {
    model.validate();
    if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("eta must lie in (0, 1]");
    const int n = model.n_cavity;
    const Matrix b = annihilation(n);
    const Matrix bd = b.adjoint();
    Matrix h = 0.5 * eta * model.omega0 * sigma_z(n) + model.omega_c * (bd * b);
    if (model.kind == ModelKind::Rabi) {
        h += 0.5 * model.lambda_c * (b + bd) * sigma_x(n);
    } else {
        h += 0.25 * model.lambda_c * (b + bd) * sigma_x(n);
        h += I * (0.25 * eta * model.lambda_c) * (b - bd) * sigma_y(n);
    }
    return h;
}

JumpOperators jump_operators(const SystemModel& model) {
    model.validate();
    const int n = model.n_cavity;
    Matrix lower = sigma_minus(n);
    if (model.kind == ModelKind::JC) {
        const Matrix b = annihilation(n);
        lower -= (model.lambda_c / (4.0 * model.omega0)) * (b - b.adjoint()) * sigma_z(n);
    }
    Matrix raise = lower.adjoint();
    return {std::move(lower), std::move(raise)};
}

std::vector<double> DressedSpectrum::gaps() const {
    std::vector<double> out;
    const Eigen::Index n = energies.size();
    out.reserve(std::size_t(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) out.push_back(energies(j) - energies(i));
    std::sort(out.begin(), out.end());
    return out;
}

DressedSpectrum dressed_spectrum(const Matrix& h) {
    if (h.rows() != h.cols()) throw ValidationError("dressed_spectrum: matrix not square");
    if (hermiticity_defect(h) > 1e-12) throw ValidationError("dressed_spectrum: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()};
}

Vector initial_ket(const SystemModel& model, const InitialState& s) {
    model.validate();
    const int n = model.n_cavity;
    if (s.cavity_fock < 0 || s.cavity_fock >= n)
        throw ValidationError("cavity Fock index must lie in [0, n_cavity)");
    Vector psi = Vector::Zero(2 * n);
    const double r = 1.0 / std::sqrt(2.0);
    const int e = s.cavity_fock, g = n + s.cavity_fock;
    switch (s.qubit) {
    case QubitState::Excited: psi(e) = 1.0; break;
    case QubitState::Ground: psi(g) = 1.0; break;
    case QubitState::Plus: psi(e) = r; psi(g) = r; break;
    case QubitState::Minus: psi(e) = r; psi(g) = -r; break;
    }
    return psi;
}

Matrix initial_density(const SystemModel& model, const InitialState& s) {
    const Vector psi = initial_ket(model, s);
    return psi * psi.adjoint();
}

Eigen::Matrix2cd plus_minus_basis() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd v;
    v << r, r, r, -r;
    return v;
}

Matrix to_plus_minus(const Matrix& op, int n) {
    const Matrix v = lift_qubit(plus_minus_basis(), n);
    return v.adjoint() * op * v;
}

} // namespace emspec
