#include "emspec/exponential_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace emspec {

namespace {

constexpr Eigen::Index kPencilSamples = 600;

// Least-squares amplitudes for fixed rates on every sample; returns the max error.
double fit_amplitudes(const Vector& y, double dt, std::vector<ExpTerm>& terms) {
    const Eigen::Index n = y.size(), k = Eigen::Index(terms.size());
    if (k == 0) return y.cwiseAbs().maxCoeff();
    Matrix basis(n, k);
    for (Eigen::Index l = 0; l < k; ++l)
        for (Eigen::Index i = 0; i < n; ++i) basis(i, l) = std::exp(-terms[l].gamma * (double(i) * dt));
    const Vector g = basis.completeOrthogonalDecomposition().solve(y);
    for (Eigen::Index l = 0; l < k; ++l) terms[l].g = g(l);
    return (basis * g - y).cwiseAbs().maxCoeff();
}

// Pencil eigenvalues for order k from the right singular vectors of the Hankel matrix.
std::vector<Complex> pencil_rates(const Matrix& v, Eigen::Index k, double h) {
    const Eigen::Index l = v.rows() - 1;
    const Matrix v1h = v.topLeftCorner(l, k).adjoint();
    const Matrix v2h = v.block(1, 0, l, k).adjoint();
    // eig(V2^H pinv(V1^H)) are the signal poles z = exp(-gamma h)
    const Matrix pinv = v1h.completeOrthogonalDecomposition().pseudoInverse();
    Eigen::ComplexEigenSolver<Matrix> es(v2h * pinv, false);
    std::vector<Complex> rates;
    for (Eigen::Index i = 0; i < k; ++i) rates.push_back(-std::log(es.eigenvalues()(i)) / h);
    return rates;
}

} // namespace

Complex ExponentialFit::operator()(double t) const {
    Complex c = 0.0;
    for (const auto& term : terms) c += term.g * std::exp(-term.gamma * t);
    return c;
}

ExponentialFit fit_exponentials(const Vector& y, double dt, int max_terms, double tolerance) {
    if (max_terms < 1) throw ValidationError("max_terms must be >= 1");
    if (y.size() < 4 * max_terms) throw ValidationError("need at least 4 * max_terms samples");
    if (!(dt > 0.0)) throw ValidationError("sample step must be positive");
    const double window = dt * double(y.size() - 1);

    ExponentialFit best;
    best.window = window;
    best.max_abs_error = y.cwiseAbs().maxCoeff();
    if (best.max_abs_error <= tolerance) return best;  // zero kernel: empty fit

    const Eigen::Index stride = std::max<Eigen::Index>(1, (y.size() + kPencilSamples - 1) / kPencilSamples);
    const Eigen::Index ns = (y.size() - 1) / stride + 1;
    Vector ys(ns);
    for (Eigen::Index i = 0; i < ns; ++i) ys(i) = y(i * stride);
    const double h = dt * double(stride);

    const Eigen::Index pencil = ns / 3;
    Matrix hankel(ns - pencil, pencil + 1);
    for (Eigen::Index i = 0; i < hankel.rows(); ++i)
        for (Eigen::Index j = 0; j <= pencil; ++j) hankel(i, j) = ys(i + j);
    Eigen::BDCSVD<Matrix> svd(hankel, Eigen::ComputeThinV);
    const Matrix& v = svd.matrixV();

    for (int k = 1; k <= max_terms && k <= pencil; ++k) {
        std::vector<ExpTerm> terms;
        for (const Complex& gamma : pencil_rates(v, k, h))
            if (std::isfinite(gamma.real()) && gamma.real() > 0.0) terms.push_back({0.0, gamma});
        const double err = fit_amplitudes(y, dt, terms);
        if (err < best.max_abs_error) {
            best.terms = terms;
            best.max_abs_error = err;
        }
        if (err <= tolerance) return best;
    }
    std::ostringstream os;
    os << "exponential fit: tolerance " << tolerance << " not reached with " << max_terms
       << " terms, best error " << best.max_abs_error;
    throw NumericalError(os.str());
}

ExponentialFit fit_kernel(KernelKind kind, const BathSpec& spec, const Renormalization& renorm,
                          const KernelFitOptions& opt) {
    spec.validate();
    const double dt = opt.step_cutoffs / spec.omega_cut;
    const Eigen::Index n = Eigen::Index(std::llround(opt.window_cutoffs / opt.step_cutoffs)) + 1;
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = double(i) * dt;
        y(i) = (kind == KernelKind::Bare) ? correlation_bare(spec, t) : correlation_transformed(spec, renorm, t);
    }
    const double tol = opt.rel_tolerance * std::abs(y(0));
    if (spec.alpha == 0.0) {
        ExponentialFit empty;
        empty.window = dt * double(n - 1);
        return empty;
    }
    return fit_exponentials(y, dt, opt.max_terms, tol);
}

} // namespace emspec
