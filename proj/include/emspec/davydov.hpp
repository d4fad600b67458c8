#pragma once
// Multiple Davydov D1 variational dynamics in the interaction picture of the reservoir.

#include <cstdint>
#include <vector>

#include "emspec/bath.hpp"
#include "emspec/hilbert.hpp"
#include "emspec/regression.hpp"

namespace emspec {

// |D> = sum_d sum_i [A_di |+>|i>|f_d> + B_di |->|i>|g_d>], |f_d>, |g_d> normalized coherent states.
struct DavydovState {
    int multiplicity = 1;
    int n_cavity = 2;
    int n_modes = 1;
    Matrix A, B;  // M x N_c
    Matrix f, g;  // M x N_b
    double t = 0.0;

    std::size_t parameter_count() const {
        return std::size_t(2 * multiplicity * (n_modes + n_cavity));
    }
};

// Amplitudes in slot d = 0, empty slots get displacement noise uniform in [-noise, noise]
// (real and imaginary parts) from a seeded generator. The physical state is exactly s.
DavydovState initialize(const SystemModel& model, const DiscretizedBath& bath, const InitialState& s,
                        int multiplicity, double noise = 1e-8, std::uint64_t seed = 0);

// Full TDVP system i G y = rhs with y = {a_d, f_dot_d (d in +), b_d, g_dot_d (d in -)},
// where a = A_dot - A Re(f^H f_dot) per slot (similarly for b).
struct DavydovEom {
    Matrix gram;
    Vector rhs;
};

DavydovEom assemble_eom(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath, double t);

struct DavydovDerivative {
    Matrix dA, dB, df, dg;
    double ddot_norm = 0.0;  // <D_dot|D_dot>
    double h2 = 0.0;         // <D|H~^2|D>
};

// Solves the TDVP equations on the span of the displacements and the driving vector,
// which is invariant under the Gram matrix, by a Tikhonov-filtered eigendecomposition
// (eps = 1e-8 of the largest eigenvalue).
DavydovDerivative solve_eom(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath,
                            double t);

// Reference solve: full Gram matrix, same filter. Slow; for tests.
DavydovDerivative solve_eom_full(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath,
                                 double t);

// One classical RK4 step. first_stage, when given, receives the derivative at the start.
DavydovState step(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath, double dt,
                  DavydovDerivative* first_stage = nullptr);

struct DeviationSample {
    double t = 0.0;
    double sigma2 = 0.0;
    bool degraded = false;  // sigma2 >= 1e-2
};

DeviationSample deviation(const DavydovDerivative& d, double t, double omega0);
DeviationSample deviation(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath,
                          double t);

// N(w_k) = <b_k^dag b_k>.
SpectrumResult direct_spectrum(const DavydovState& state, const DiscretizedBath& bath);

// <D|O|D> for a system operator given in the {e, g} basis.
Complex expectation(const DavydovState& state, const Matrix& op);
// <D1|O|D2> for a system operator given in the {e, g} basis.
Complex transition_element(const DavydovState& bra, const DavydovState& ket, const Matrix& op);
// <D|D>.
double norm2(const DavydovState& state);

// Applies a system operator diagonal in {+, -} (sigma_x) to the state: B -> -B.
DavydovState apply_sigma_x(const DavydovState& state);

struct DavydovSample {
    double t = 0.0;
    double sigma_z = 0.0;
    double sigma_x = 0.0;
    double norm = 0.0;
    double sigma2 = 0.0;
    double excitation = 0.0;  // <sigma_+ sigma_- + b^dag b>
    double emitted = 0.0;     // sum_k N(w_k)
};

struct DavydovRun {
    std::vector<DavydovSample> samples;
    DavydovState final_state;
    SpectrumResult spectrum;        // at t_end
    SpectrumResult early_spectrum;  // at 0.75 t_end
    double max_sigma2 = 0.0;
    bool degraded = false;
};

struct DavydovOptions {
    int multiplicity = 6;
    double noise = 1e-8;
    std::uint64_t seed = 0;
    double dt = 0.01;
    double t_end = 100.0;
    double delta = 0.1;  // sampling interval
    double stability_threshold = 0.02;
};

DavydovRun run_davydov(const SystemModel& model, const DiscretizedBath& bath, const InitialState& s,
                       const DavydovOptions& opt);

// Dense Schroedinger evolution of system (x) N_b truncated modes.
struct OracleTrajectory {
    std::vector<double> times;
    std::vector<double> sigma_z;
    std::vector<Complex> sigma_x_corr;  // <sigma_x(t) sigma_x(0)>
    std::vector<RealVector> photons;    // per-mode <n_k>(t)
};

OracleTrajectory exact_small_oracle(const SystemModel& model, const DiscretizedBath& bath, int fock_cut,
                                    const InitialState& s, double t_end, double delta);

} // namespace emspec
