#pragma once
// Ohmic reservoir: spectral density, mode discretization, polaron renormalization, kernels.

#include <functional>

#include "emspec/types.hpp"

namespace emspec {

struct BathSpec {
    double alpha = 0.0;
    double omega_cut = 5.0;
    double omega_max = 20.0;
    int n_modes = 500;

    void validate() const;
};

// J(w) = 2 alpha w exp(-w / w_cut).
double spectral_density(const BathSpec& spec, double omega);

struct DiscretizedBath {
    RealVector omegas;     // ascending, last == omega_max
    RealVector couplings;  // lambda_k

    Eigen::Index size() const { return omegas.size(); }
    // sum_k lambda_k^2 / 4 exp(-i w_k t); tends to correlation_bare.
    Complex correlation(double t) const;
};

DiscretizedBath discretize(const BathSpec& spec);

struct Renormalization {
    double eta = 1.0;
    RealVector xi;            // per discrete mode; empty for the continuum solve
    RealVector lambda_tilde;  // per discrete mode; empty for the continuum solve
    double omega0 = 1.0;
    bool continuum = true;
    bool converged = true;
    int iterations = 0;
    double residual = 0.0;

    double xi_of(double omega) const { return omega / (eta * omega0 + omega); }
};

// Right-hand side of the eta fixed point, exp(-1/2 sum_k lambda_k^2/(eta w0 + w_k)^2)
// or its continuum integral when bath is null.
double eta_map(const BathSpec& spec, double omega0, double eta, const DiscretizedBath* bath = nullptr);

// Damped iteration from eta = 1 (theta = 0.5).
Renormalization solve_renormalization(const BathSpec& spec, double omega0,
                                      const DiscretizedBath* bath = nullptr);

// Independent root of eta - eta_map(eta) by bisection on (0, 1].
double solve_eta_bisection(const BathSpec& spec, double omega0, const DiscretizedBath* bath = nullptr);

// C(t) = alpha w_cut^2 / (2 (1 + i w_cut t)^2).
Complex correlation_bare(const BathSpec& spec, double t);

// C~(t) = int (eta w0/(eta w0 + w))^2 J(w) exp(-i w t) dw.
Complex correlation_transformed(const BathSpec& spec, const Renormalization& renorm, double t);

// int_0^inf filter(w) J(w) exp(-i w t) dw by adaptive Gauss-Kronrod on [0, 40 w_cut].
// Throws NumericalError when the relative tolerance is not reached.
Complex spectral_integral(const BathSpec& spec, const std::function<double(double)>& filter, double t,
                          double rel_tol = 1e-8);

struct ValidityMetrics {
    double c0_bare_scaled = 0.0;         // |C(0)| / w_cut^2
    double c0_transformed_scaled = 0.0;  // |C~(0)| / w_cut^2
    double eta = 1.0;
};

ValidityMetrics validity_metrics(const BathSpec& spec, double omega0);

} // namespace emspec
