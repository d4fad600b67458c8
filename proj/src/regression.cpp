#include "emspec/regression.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emspec {

namespace {

int final_index(const CorrelationGrid& grid, double t_final) {
    const int n = int(std::lround(t_final / grid.delta));
    if (n < 0 || n >= grid.size() || std::abs(double(n) * grid.delta - t_final) > 1e-9 * std::max(1.0, t_final))
        throw ValidationError("t_final must be a grid node inside the correlation grid");
    return n;
}

double weight(int i, int n) { return (i == 0 || i == n) ? 0.5 : 1.0; }

void check_modes(const RealVector& omegas, const RealVector& couplings) {
    if (omegas.size() != couplings.size()) throw ValidationError("frequency and coupling arrays differ in length");
    for (Eigen::Index k = 1; k < omegas.size(); ++k)
        if (!(omegas(k) > omegas(k - 1))) throw ValidationError("frequencies must be strictly ascending");
}

} // namespace

double CorrelationGrid::diagonal_defect() const {
    double d = 0.0;
    for (int i = 0; i < size(); ++i) d = std::max(d, std::abs(values(i, i) - 1.0));
    return d;
}

CorrelationGrid build_grid(const MethodSetup& setup, const Matrix& rho0, const TimeGrid& grid, int workers) {
    const DensityTrajectory traj = propagate_density(setup, rho0, grid);
    CorrelationGrid out;
    out.delta = grid.delta;
    out.values = correlation_matrix(setup, traj, grid, workers);
    const double defect = out.diagonal_defect();
    if (defect > 1e-6) {
        std::ostringstream os;
        os << "correlation diagonal deviates from 1 by " << defect;
        throw NumericalError(os.str());
    }
    return out;
}

RealVector SpectrumResult::normalized() const {
    const double m = values.size() ? values.maxCoeff() : 0.0;
    return m > 0.0 ? RealVector(values / m) : values;
}

SpectrumResult spectrum(const CorrelationGrid& grid, const RealVector& omegas, const RealVector& couplings,
                        double t_final) {
    check_modes(omegas, couplings);
    const int n = final_index(grid, t_final);
    // lag sums L_m = sum_i w_i w_{i+m} G(i+m, i)
    Vector lag = Vector::Zero(n + 1);
    for (int m = 0; m <= n; ++m) {
        Complex s = 0.0;
        for (int i = 0; i + m <= n; ++i) s += weight(i, n) * weight(i + m, n) * grid.values(i + m, i);
        lag(m) = s;
    }
    const double d2 = grid.delta * grid.delta;
    SpectrumResult out;
    out.frequencies = omegas;
    out.values.resize(omegas.size());
    out.t_final = t_final;
    double max_abs = 0.0, max_imag = 0.0;
    for (Eigen::Index k = 0; k < omegas.size(); ++k) {
        const Complex step = std::exp(-I * (omegas(k) * grid.delta));
        Complex phase = step, acc = 0.0;
        for (int m = 1; m <= n; ++m) {
            acc += lag(m) * phase;
            phase *= step;
        }
        const double pref = 0.25 * couplings(k) * couplings(k) * d2;
        const Complex v = pref * (lag(0) + 2.0 * acc.real());
        out.values(k) = v.real();
        max_abs = std::max(max_abs, std::abs(v.real()));
        max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    out.imag_residue = max_abs > 0.0 ? max_imag / max_abs : 0.0;
    return out;
}

Vector spectrum_full_sum(const CorrelationGrid& grid, const RealVector& omegas, const RealVector& couplings,
                         double t_final) {
    check_modes(omegas, couplings);
    const int n = final_index(grid, t_final);
    Vector out(omegas.size());
    for (Eigen::Index k = 0; k < omegas.size(); ++k) {
        Complex s = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                s += weight(i, n) * weight(j, n) * grid.at(i, j) * std::exp(-I * (omegas(k) * grid.delta * (i - j)));
        out(k) = 0.25 * couplings(k) * couplings(k) * grid.delta * grid.delta * s;
    }
    return out;
}

double trapezoid(const RealVector& x, const RealVector& y) {
    double s = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i) s += 0.5 * (x(i) - x(i - 1)) * (y(i) + y(i - 1));
    return s;
}

double relative_change(const RealVector& omegas, const RealVector& earlier, const RealVector& later) {
    const double denom = trapezoid(omegas, later.cwiseAbs());
    if (denom == 0.0) return trapezoid(omegas, earlier.cwiseAbs()) == 0.0 ? 0.0 : 1.0;
    return trapezoid(omegas, (later - earlier).cwiseAbs()) / denom;
}

SpectrumResult steady_state_spectrum(const CorrelationGrid& grid, const RealVector& omegas,
                                     const RealVector& couplings, double threshold, double fraction) {
    const double t_end = grid.t_end();
    SpectrumResult out = spectrum(grid, omegas, couplings, t_end);
    const double t_early = std::round(fraction * t_end / grid.delta) * grid.delta;
    const SpectrumResult early = spectrum(grid, omegas, couplings, t_early);
    out.stability = relative_change(omegas, early.values, out.values);
    out.stable = out.stability < threshold;
    return out;
}

std::vector<Peak> find_peaks(const RealVector& x, const RealVector& y, double min_prominence) {
    std::vector<Peak> peaks;
    const Eigen::Index n = y.size();
    if (n == 0) return peaks;
    const double top = y.maxCoeff();
    if (!(top > 0.0)) return peaks;
    Eigen::Index i = 1;
    while (i < n - 1) {
        if (y(i) > y(i - 1)) {
            // walk across a plateau; a peak needs a strict drop after it
            Eigen::Index j = i;
            while (j + 1 < n && y(j + 1) == y(i)) ++j;
            if (j + 1 < n && y(j + 1) < y(i)) {
                const Eigen::Index mid = (i + j) / 2;
                const double h = y(mid);
                double left_min = h, right_min = h;
                for (Eigen::Index l = i - 1; l >= 0 && y(l) <= h; --l) left_min = std::min(left_min, y(l));
                for (Eigen::Index r = j + 1; r < n && y(r) <= h; ++r) right_min = std::min(right_min, y(r));
                const double prom = h - std::max(left_min, right_min);
                if (prom >= min_prominence * top) peaks.push_back({x(mid), h, prom});
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    return peaks;
}

std::vector<Peak> dominant_peaks(std::vector<Peak> peaks, std::size_t n) {
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    if (peaks.size() > n) peaks.resize(n);
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.omega < b.omega; });
    return peaks;
}

double normalized_l1_distance(const RealVector& omegas, const RealVector& a, const RealVector& b) {
    if (a.size() != omegas.size() || b.size() != omegas.size())
        throw ValidationError("spectra must share one frequency grid");
    auto norm = [](const RealVector& v) {
        const double m = v.cwiseAbs().maxCoeff();
        return m > 0.0 ? RealVector(v / m) : v;
    };
    const RealVector na = norm(a), nb = norm(b);
    const double denom = 0.5 * (trapezoid(omegas, na.cwiseAbs()) + trapezoid(omegas, nb.cwiseAbs()));
    if (denom == 0.0) return 0.0;
    return trapezoid(omegas, (na - nb).cwiseAbs()) / denom;
}

} // namespace emspec
