#pragma once
// Qubit (x) cavity operator algebra. Basis index = q * n_cavity + n, q = 0 excited, 1 ground.

#include <vector>

#include "emspec/types.hpp"

namespace emspec {

enum class ModelKind { Rabi, JC };

struct SystemModel {
    ModelKind kind = ModelKind::Rabi;
    double omega0 = 1.0;
    double omega_c = 1.0;
    double lambda_c = 0.0;
    int n_cavity = 10;

    void validate() const;
    int dim() const { return 2 * n_cavity; }
};

enum class QubitState { Excited, Ground, Plus, Minus };

struct InitialState {
    QubitState qubit = QubitState::Excited;
    int cavity_fock = 0;
};

// Qubit operators lifted to the full space (identity on the cavity).
Matrix sigma_x(int n_cavity);
Matrix sigma_y(int n_cavity);
Matrix sigma_z(int n_cavity);
Matrix sigma_plus(int n_cavity);  // |e><g|
Matrix sigma_minus(int n_cavity);

// Cavity operators lifted to the full space.
Matrix annihilation(int n_cavity);
Matrix number(int n_cavity);

// sigma_+ sigma_- + b^dag b, conserved by the closed JC model.
Matrix excitation_number(int n_cavity);
// sigma_z (-1)^{b^dag b}, conserved by the closed Rabi model.
Matrix parity(int n_cavity);

// eta = 1 gives the bare Hamiltonian; eta < 1 the polaron-dressed one.
Matrix build_hamiltonian(const SystemModel& model, double eta = 1.0);

struct JumpOperators {
    Matrix lowering;
    Matrix raising;  // always lowering.adjoint()
};

// Rabi: sigma_-/sigma_+. JC: S_-/S_+ with the (b - b^dag) sigma_z correction.
JumpOperators jump_operators(const SystemModel& model);

struct DressedSpectrum {
    RealVector energies;  // ascending

    // All E_j - E_i for i < j, ascending.
    std::vector<double> gaps() const;
};

DressedSpectrum dressed_spectrum(const Matrix& h);

Matrix initial_density(const SystemModel& model, const InitialState& s);
Vector initial_ket(const SystemModel& model, const InitialState& s);

// Columns are |+>, |-> written in the {e, g} basis (2x2).
Eigen::Matrix2cd plus_minus_basis();
// Full-space change of basis: O_pm = V^H O V, with V = plus_minus_basis (x) 1.
Matrix to_plus_minus(const Matrix& op, int n_cavity);

} // namespace emspec
