#include "emspec/bath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace emspec {

namespace {

constexpr double kUpperCutoffs = 40.0;  // integrate J out to 40 w_cut

// Integral of g over [a, b]; each panel spans at most one oscillation period of exp(-i w t).
double panel_integral(const std::function<double(double)>& g, double a, double b, double width,
                      double rel_tol, double& err_out) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0, err = 0.0;
    const int panels = std::max(1, int(std::ceil((b - a) / width)));
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double e = 0.0;
        total += gauss_kronrod<double, 31>::integrate(g, a + p * w, a + (p + 1) * w, 12, rel_tol * 1e-2, &e);
        err += e;
    }
    err_out = err;
    return total;
}

} // namespace

void BathSpec::validate() const {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be non-negative");
    if (!(omega_cut > 0.0)) throw ValidationError("omega_cut must be positive");
    if (!(omega_max > omega_cut)) throw ValidationError("omega_max must exceed omega_cut");
    if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
}

double spectral_density(const BathSpec& spec, double omega) {
    if (omega < 0.0) throw ValidationError("spectral_density: negative frequency");
    return 2.0 * spec.alpha * omega * std::exp(-omega / spec.omega_cut);
}

Complex DiscretizedBath::correlation(double t) const {
    Complex c = 0.0;
    for (Eigen::Index k = 0; k < size(); ++k)
        c += 0.25 * couplings(k) * couplings(k) * std::exp(-I * (omegas(k) * t));
    return c;
}

DiscretizedBath discretize(const BathSpec& spec) {
    spec.validate();
    const int n = spec.n_modes;
    const double span = 1.0 - std::exp(-spec.omega_max / spec.omega_cut);
    DiscretizedBath bath;
    bath.omegas.resize(n);
    bath.couplings.resize(n);
    for (int k = 1; k <= n; ++k) {
        // log1p keeps the k = n endpoint exact to rounding
        const double w = (k == n) ? spec.omega_max : -spec.omega_cut * std::log1p(-(double(k) / n) * span);
        bath.omegas(k - 1) = w;
        bath.couplings(k - 1) = std::sqrt(2.0 * spec.alpha * w * spec.omega_cut * span / n);
    }
    return bath;
}

double eta_map(const BathSpec& spec, double omega0, double eta, const DiscretizedBath* bath) {
    const double shift = eta * omega0;
    double s = 0.0;
    if (bath) {
        for (Eigen::Index k = 0; k < bath->size(); ++k) {
            const double d = shift + bath->omegas(k);
            s += bath->couplings(k) * bath->couplings(k) / (d * d);
        }
    } else if (spec.alpha > 0.0) {
        using boost::math::quadrature::gauss_kronrod;
        auto f = [&](double w) { return spectral_density(spec, w) / ((shift + w) * (shift + w)); };
        // the integrand peaks near eta w0, so split there and at w_cut
        const double a = std::min(shift, spec.omega_cut), b = std::max(shift, spec.omega_cut);
        s = gauss_kronrod<double, 61>::integrate(f, 0.0, a, 15, 1e-14);
        s += gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
        s += gauss_kronrod<double, 61>::integrate(f, b, std::numeric_limits<double>::infinity(), 15, 1e-14);
    }
    return std::exp(-0.5 * s);
}

Renormalization solve_renormalization(const BathSpec& spec, double omega0, const DiscretizedBath* bath) {
    spec.validate();
    if (!(omega0 > 0.0)) throw ValidationError("omega0 must be positive");
    Renormalization r;
    r.omega0 = omega0;
    r.continuum = (bath == nullptr);
    constexpr double theta = 0.5;
    constexpr int max_iter = 1000;
    double eta = 1.0;
    double residual = std::abs(eta - eta_map(spec, omega0, eta, bath));
    int it = 0;
    while (residual >= 1e-12 && it < max_iter) {
        eta = (1.0 - theta) * eta + theta * eta_map(spec, omega0, eta, bath);
        residual = std::abs(eta - eta_map(spec, omega0, eta, bath));
        ++it;
    }
    r.eta = eta;
    r.iterations = it;
    r.residual = residual;
    r.converged = residual < 1e-10;
    if (!r.converged) {
        std::ostringstream os;
        os << "eta fixed point did not converge, residual " << residual;
        throw NumericalError(os.str());
    }
    if (bath) {
        const RealVector denom = (bath->omegas.array() + eta * omega0).matrix();
        r.xi = bath->omegas.cwiseQuotient(denom);
        r.lambda_tilde = (eta * omega0) * bath->couplings.cwiseQuotient(denom);
    }
    return r;
}

double solve_eta_bisection(const BathSpec& spec, double omega0, const DiscretizedBath* bath) {
    // f(eta) = eta - map(eta) is increasing: map decreases as eta shrinks
    double lo = 1e-12, hi = 1.0;
    if (hi - eta_map(spec, omega0, hi, bath) <= 0.0) return 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid - eta_map(spec, omega0, mid, bath) > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

Complex correlation_bare(const BathSpec& spec, double t) {
    const Complex d = 1.0 + I * (spec.omega_cut * t);
    return spec.alpha * spec.omega_cut * spec.omega_cut / (2.0 * d * d);
}

Complex spectral_integral(const BathSpec& spec, const std::function<double(double)>& filter, double t,
                          double rel_tol) {
    if (spec.alpha == 0.0) return 0.0;
    const double top = kUpperCutoffs * spec.omega_cut;
    const double width = std::min(spec.omega_cut, (t > 0.0) ? 2.0 * M_PI / t : spec.omega_cut);
    auto re = [&](double w) { return filter(w) * spectral_density(spec, w) * std::cos(w * t); };
    auto im = [&](double w) { return -filter(w) * spectral_density(spec, w) * std::sin(w * t); };
    double err_re = 0.0, err_im = 0.0;
    const double vr = panel_integral(re, 0.0, top, width, rel_tol, err_re);
    const double vi = panel_integral(im, 0.0, top, width, rel_tol, err_im);
    // bound on the dropped tail, assuming |filter| <= 1
    const double tail = 2.0 * spec.alpha * spec.omega_cut * (top + spec.omega_cut) * std::exp(-kUpperCutoffs);
    // scale: the t = 0 magnitude of the integral, bounded by the unfiltered mass
    const double scale = 2.0 * spec.alpha * spec.omega_cut * spec.omega_cut;
    const double err = err_re + err_im + tail;
    if (err > rel_tol * scale) {
        std::ostringstream os;
        os << "spectral quadrature reached only " << err / scale << " relative accuracy at t=" << t;
        throw NumericalError(os.str());
    }
    return {vr, vi};
}

Complex correlation_transformed(const BathSpec& spec, const Renormalization& renorm, double t) {
    const double s = renorm.eta * renorm.omega0;
    return spectral_integral(spec, [s](double w) { return (s / (s + w)) * (s / (s + w)); }, t);
}

ValidityMetrics validity_metrics(const BathSpec& spec, double omega0) {
    const Renormalization r = solve_renormalization(spec, omega0);
    const double wc2 = spec.omega_cut * spec.omega_cut;
    ValidityMetrics m;
    m.eta = r.eta;
    m.c0_bare_scaled = std::abs(correlation_bare(spec, 0.0)) / wc2;
    m.c0_transformed_scaled = std::abs(correlation_transformed(spec, r, 0.0)) / wc2;
    return m;
}

} // namespace emspec
