#pragma once
// Master-equation propagators (PTNZE, SNZE, PTBRE) for rho_S and the regression operator Lambda_S.

#include <string>
#include <vector>

#include "emspec/bath.hpp"
#include "emspec/exponential_fit.hpp"
#include "emspec/hilbert.hpp"

namespace emspec {

enum class MethodKind { PTNZE, SNZE, PTBRE };

std::string to_string(MethodKind m);
MethodKind method_from_string(const std::string& s);

// Operators and kernel a method runs with.
struct MethodSetup {
    MethodKind method = MethodKind::PTNZE;
    Matrix hamiltonian;  // H' (PTNZE, PTBRE) or bare H (SNZE)
    Matrix lowering;     // J_-: sigma_- / S_- or sigma_x
    Matrix raising;      // J_+ = J_-^H
    Matrix sigma_x;
    ExponentialFit fit;  // fit of C~ (PTNZE, PTBRE) or C (SNZE)
};

MethodSetup make_setup(MethodKind method, const SystemModel& model, const Renormalization& renorm,
                       const ExponentialFit& fit);

// Integrator step and output sampling. dt is shrunk so that it divides delta.
struct TimeGrid {
    double t_end = 100.0;
    double delta = 0.1;  // sampling interval
    double dt = 0.01;    // integrator step

    void validate() const;
    int samples() const;   // number of sample points including t = 0
    int substeps() const;  // integrator steps per sample
    double step() const { return delta / substeps(); }
};

struct DensityState {
    double t = 0.0;
    Matrix rho;
    // PTNZE/SNZE: rho_l. PTBRE: Theta_l(t) rho(t), the time-local stand-in for rho_l.
    std::vector<Matrix> aux;
};

struct DensityTrajectory {
    MethodKind method = MethodKind::PTNZE;
    bool reconstructed = false;  // PTBRE equations are a reconstruction
    double delta = 0.0;
    std::vector<DensityState> samples;
};

DensityTrajectory propagate_density(const MethodSetup& setup, const Matrix& rho0, const TimeGrid& grid);

// Regression state after anchor t'. f and g already carry the sigma_x(t,t') factor:
// f_l = sigma_x(t,t') F_l, g_l = sigma_x(t,t') F_l^H.
struct TwoTimeState {
    double t_prime = 0.0;
    double t = 0.0;
    Matrix lambda;
    std::vector<Matrix> x, y;  // memory accumulated after t' (empty for PTBRE)
    std::vector<Matrix> f, g;  // memory carried over from [0, t']
    Complex correlation = 0.0; // Tr[sigma_x lambda]
};

// Propagates from the anchor sample index to grid.t_end, sampling every delta.
std::vector<TwoTimeState> propagate_two_time(const MethodSetup& setup, const DensityTrajectory& traj,
                                             int anchor, const TimeGrid& grid);

// G(t1, t2) for t1 >= t2 on the sample grid (entries above the diagonal are zero).
// PTNZE/SNZE use the adjoint of the time-invariant regression generator; PTBRE
// runs one forward propagation per anchor. workers > 1 splits anchors across threads.
Matrix correlation_matrix(const MethodSetup& setup, const DensityTrajectory& traj, const TimeGrid& grid,
                          int workers = 1);

} // namespace emspec
