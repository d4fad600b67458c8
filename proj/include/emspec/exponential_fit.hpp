#pragma once
// Exponential-sum representation of a memory kernel: C(t) ~ sum_l g_l exp(-gamma_l t).

#include <vector>

#include "emspec/bath.hpp"

namespace emspec {

struct ExpTerm {
    Complex g;
    Complex gamma;  // Re gamma > 0
};

struct ExponentialFit {
    std::vector<ExpTerm> terms;
    double max_abs_error = 0.0;
    double window = 0.0;

    Complex operator()(double t) const;
    std::size_t size() const { return terms.size(); }
};

// Matrix-pencil fit of uniform samples y_n = C(n dt). Returns the fewest terms
// (<= max_terms) whose max error over the samples is <= tolerance.
ExponentialFit fit_exponentials(const Vector& samples, double dt, int max_terms, double tolerance);

enum class KernelKind { Bare, Transformed };

struct KernelFitOptions {
    int max_terms = 8;
    double window_cutoffs = 20.0;  // window = window_cutoffs / w_cut
    double step_cutoffs = 0.01;    // sample step = step_cutoffs / w_cut
    double rel_tolerance = 1e-3;   // relative to |kernel(0)|
};

// Samples the requested kernel on the default window and fits it.
ExponentialFit fit_kernel(KernelKind kind, const BathSpec& spec, const Renormalization& renorm,
                          const KernelFitOptions& opt = {});

} // namespace emspec
