#pragma once

#include <doctest.h>

#include "emspec/experiment.hpp"

namespace test {

inline emspec::SystemModel model(emspec::ModelKind k, double lambda, int n_cavity = 6) {
    emspec::SystemModel m;
    m.kind = k;
    m.lambda_c = lambda;
    m.n_cavity = n_cavity;
    return m;
}

inline emspec::BathSpec bath(double alpha, int n_modes = 150) {
    emspec::BathSpec b;
    b.alpha = alpha;
    b.n_modes = n_modes;
    return b;
}

inline double max_abs(const emspec::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace test
