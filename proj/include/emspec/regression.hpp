#pragma once
// Two-time correlation grid and emission spectra built from it.

#include <map>
#include <string>
#include <vector>

#include "emspec/meq.hpp"

namespace emspec {

// G(t1, t2) = <sigma_x(t1) sigma_x(t2)> stored for t1 >= t2; the upper triangle is implied by conjugation.
struct CorrelationGrid {
    double delta = 0.0;
    Matrix values;

    int size() const { return int(values.rows()); }
    double t_end() const { return delta * double(size() - 1); }
    Complex at(int i, int j) const { return i >= j ? values(i, j) : std::conj(values(j, i)); }
    // Largest |G(t, t) - 1| on the diagonal.
    double diagonal_defect() const;
};

CorrelationGrid build_grid(const MethodSetup& setup, const Matrix& rho0, const TimeGrid& grid, int workers = 1);

struct SpectrumResult {
    RealVector frequencies;  // ascending
    RealVector values;       // N(w, t_final)
    double t_final = 0.0;
    std::string method;
    double imag_residue = 0.0;  // max |Im N| / max |N|
    double stability = -1.0;    // relative L1 change between 0.75 T and T; < 0 when not certified
    bool stable = false;
    std::map<std::string, std::string> metadata;

    RealVector normalized() const;  // values / max(values)
};

// N(w_k, t) = lambda_k^2/4 int int G exp(-i w_k (t1 - t2)) with trapezoid weights.
SpectrumResult spectrum(const CorrelationGrid& grid, const RealVector& omegas, const RealVector& couplings,
                        double t_final);

// Same double sum evaluated over the full square with the upper triangle conjugated.
// Returns complex values; used to check realness and the lower-triangle shortcut.
Vector spectrum_full_sum(const CorrelationGrid& grid, const RealVector& omegas, const RealVector& couplings,
                         double t_final);

// Relative L1 change between two spectra on the same grid, normalized by the later one.
double relative_change(const RealVector& omegas, const RealVector& earlier, const RealVector& later);

// Spectrum at the grid end plus a certificate comparing against fraction * T.
SpectrumResult steady_state_spectrum(const CorrelationGrid& grid, const RealVector& omegas,
                                     const RealVector& couplings, double threshold = 0.02,
                                     double fraction = 0.75);

struct Peak {
    double omega = 0.0;
    double height = 0.0;
    double prominence = 0.0;
};

// Local maxima whose topographic prominence is at least min_prominence * max(values).
std::vector<Peak> find_peaks(const RealVector& omegas, const RealVector& values, double min_prominence = 0.05);

// The n highest peaks, returned in ascending frequency.
std::vector<Peak> dominant_peaks(std::vector<Peak> peaks, std::size_t n);

// Symmetric L1 distance of max-normalized spectra: int |a - b| / (0.5 (int |a| + int |b|)).
double normalized_l1_distance(const RealVector& omegas, const RealVector& a, const RealVector& b);

// Trapezoid integral on a nonuniform grid.
double trapezoid(const RealVector& x, const RealVector& y);

} // namespace emspec
