#include "emspec/davydov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace emspec {

namespace {

// Tikhonov filter ev / (ev^2 + eps^2), eps = kRegularization * max ev. A hard pseudo-inverse
// cutoff switches directions on and off between RK stages and leaks norm.
constexpr double kRegularization = 1e-8;

// Configurations c = 0..2M-1: the first M are the |+> slots (A, f), the last M the |-> slots (B, g).
struct Packed {
    int m = 0;
    Matrix psi;  // 2M x N_c
    Matrix z;    // 2M x N_b

    int sector(int c) const { return c < m ? 0 : 1; }
    double sign(int c) const { return c < m ? 1.0 : -1.0; }
};

Packed pack(const DavydovState& s) {
    Packed p;
    p.m = s.multiplicity;
    p.psi.resize(2 * s.multiplicity, s.n_cavity);
    p.psi << s.A, s.B;
    p.z.resize(2 * s.multiplicity, s.n_modes);
    p.z << s.f, s.g;
    return p;
}

void unpack(const Packed& p, DavydovState& s) {
    s.A = p.psi.topRows(p.m);
    s.B = p.psi.bottomRows(p.m);
    s.f = p.z.topRows(p.m);
    s.g = p.z.bottomRows(p.m);
}

// S(c, c') = <z_c|z_c'>.
Matrix overlaps(const Matrix& za, const Matrix& zb) {
    const Matrix zz = za.conjugate() * zb.transpose();
    const RealVector na = za.rowwise().squaredNorm();
    const RealVector nb = zb.rowwise().squaredNorm();
    Matrix s(zz.rows(), zz.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = std::exp(zz(i, j) - 0.5 * (na(i) + nb(j)));
    return s;
}

// psi_c embedded in the 2 N_c system space of its sector; columns are configurations.
Matrix embed(const Packed& p) {
    const Eigen::Index nc = p.psi.cols();
    Matrix out = Matrix::Zero(2 * nc, p.psi.rows());
    for (int c = 0; c < p.psi.rows(); ++c) out.col(c).segment(p.sector(c) * nc, nc) = p.psi.row(c).transpose();
    return out;
}

// Quantities shared by the full and reduced assemblies at one instant.
struct Terms {
    Matrix s;      // overlaps, 2M x 2M
    Matrix u;      // <psi_c|psi_c'>
    Matrix hpsi;   // H_pm applied to embedded psi, 2N_c x 2M
    Matrix hq;     // <psi_c|H_{q q'}|psi_c'>
    Matrix beta;   // bath term sum_k lambda_k/2 (z*_ck e^{iwt} + z_c'k e^{-iwt})
    Vector ell;    // lambda_k e^{i w_k t}
    Matrix emb;
};

Terms make_terms(const Packed& p, const Matrix& hpm, const DiscretizedBath& bath, double t) {
    Terms tm;
    tm.s = overlaps(p.z, p.z);
    tm.u = p.psi.conjugate() * p.psi.transpose();
    tm.emb = embed(p);
    tm.hpsi = hpm * tm.emb;
    tm.hq = tm.emb.adjoint() * tm.hpsi;
    tm.ell.resize(bath.size());
    for (Eigen::Index k = 0; k < bath.size(); ++k) tm.ell(k) = bath.couplings(k) * std::exp(I * (bath.omegas(k) * t));
    const Vector zl = p.z.conjugate() * tm.ell;            // z_c^H ell
    const Vector lz = p.z * tm.ell.conjugate();            // ell^H z_c'
    tm.beta.resize(p.z.rows(), p.z.rows());
    for (Eigen::Index c = 0; c < p.z.rows(); ++c)
        for (Eigen::Index d = 0; d < p.z.rows(); ++d) tm.beta(c, d) = 0.5 * (zl(c) + lz(d));
    return tm;
}

// R1(c, :) = sum_c' S [ (H_{q q'} psi_c') + s_q delta_qq' beta psi_c' ].
Vector rhs_amplitude(const Packed& p, const Terms& tm, int c) {
    const Eigen::Index nc = p.psi.cols();
    Vector r = Vector::Zero(nc);
    const int q = p.sector(c);
    for (int d = 0; d < p.psi.rows(); ++d) {
        Vector v = tm.hpsi.col(d).segment(q * nc, nc);
        if (p.sector(d) == q) v += p.sign(c) * tm.beta(c, d) * p.psi.row(d).transpose();
        r += tm.s(c, d) * v;
    }
    return r;
}

// Coefficients of R2(c) = sum_c' coef_c' z_c' + extra * ell.
void rhs_displacement(const Packed& p, const Terms& tm, int c, Vector& coef, Complex& extra) {
    const int n = int(p.psi.rows());
    coef.resize(n);
    extra = 0.0;
    const int q = p.sector(c);
    for (int d = 0; d < n; ++d) {
        Complex v = tm.hq(c, d);
        if (p.sector(d) == q) {
            v += p.sign(c) * tm.u(c, d) * tm.beta(c, d);
            extra += tm.s(c, d) * p.sign(c) * tm.u(c, d) * 0.5;
        }
        coef(d) = tm.s(c, d) * v;
    }
}

double h2_expectation(const Packed& p, const Terms& tm, const Matrix& h2pm, const DiscretizedBath& bath) {
    const Matrix h2 = tm.emb.adjoint() * (h2pm * tm.emb);
    const double lam2 = 0.25 * bath.couplings.squaredNorm();
    Complex acc = 0.0;
    for (int c = 0; c < p.psi.rows(); ++c)
        for (int d = 0; d < p.psi.rows(); ++d) {
            Complex v = h2(c, d) + (p.sign(c) + p.sign(d)) * tm.hq(c, d) * tm.beta(c, d);
            if (p.sector(c) == p.sector(d)) v += tm.u(c, d) * (tm.beta(c, d) * tm.beta(c, d) + lam2);
            acc += tm.s(c, d) * v;
        }
    return acc.real();
}

// Regularized solve of a Hermitian positive semidefinite system.
Vector hermitian_solve(const Matrix& g, const Vector& b, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const RealVector& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (!(top > 0.0) || !std::isfinite(top)) {
        std::ostringstream os;
        os << "variational solve failed at t=" << t << ": all singular values below cutoff";
        throw NumericalError(os.str());
    }
    const Matrix& v = es.eigenvectors();
    Vector proj = v.adjoint() * b;
    const double eps2 = (kRegularization * top) * (kRegularization * top);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        proj(i) = ev(i) > 0.0 ? proj(i) * (ev(i) / (ev(i) * ev(i) + eps2)) : Complex(0.0);
    return v * proj;
}

struct PackedDerivative {
    Matrix dpsi, dz;
    double ddot_norm = 0.0;
    double h2 = 0.0;
};

Matrix hamiltonian_pm(const SystemModel& model) { return to_plus_minus(build_hamiltonian(model, 1.0), model.n_cavity); }

PackedDerivative derivative_reduced(const Packed& p, const Matrix& hpm, const Matrix& h2pm,
                                    const DiscretizedBath& bath, double t) {
    const int m = p.m, n = 2 * m;
    const Eigen::Index nc = p.psi.cols(), nb = p.z.cols();
    const Terms tm = make_terms(p, hpm, bath, t);

    // orthonormal basis of a subspace containing every z_c and ell
    Matrix cols(nb, n + 1);
    cols.leftCols(n) = p.z.transpose();
    cols.col(n) = tm.ell;
    const Eigen::Index r = std::min<Eigen::Index>(nb, n + 1);
    const Matrix q = Eigen::HouseholderQR<Matrix>(cols).householderQ() * Matrix::Identity(nb, r);
    const Matrix zr = p.z * q.conjugate();   // rows: Q^H z_c
    const Vector lr = q.adjoint() * tm.ell;

    PackedDerivative out;
    out.dpsi.resize(n, nc);
    out.dz.resize(n, nb);
    out.h2 = h2_expectation(p, tm, h2pm, bath);
    const Eigen::Index dim = m * (nc + r);
    for (int sec = 0; sec < 2; ++sec) {
        const int c0 = sec * m;
        Matrix g = Matrix::Zero(dim, dim);
        Vector rhs(dim);
        for (int a = 0; a < m; ++a) {
            const int c = c0 + a;
            const Eigen::Index ra = a * nc, rw = m * nc + a * r;
            for (int b = 0; b < m; ++b) {
                const int d = c0 + b;
                const Complex s = tm.s(c, d);
                const Eigen::Index ca = b * nc, cw = m * nc + b * r;
                g.block(ra, ca, nc, nc).diagonal().setConstant(s);
                // a-row, w-column: psi_d(j) conj(Zr_c,k) S
                g.block(ra, cw, nc, r) = s * p.psi.row(d).transpose() * zr.row(c).conjugate();
                // w-row, a-column: Zr_d,p conj(psi_c(j)) S
                g.block(rw, ca, r, nc) = s * zr.row(d).transpose() * p.psi.row(c).conjugate();
                // w-row, w-column: u S (delta + Zr_d,p conj(Zr_c,k))
                Matrix ww = zr.row(d).transpose() * zr.row(c).conjugate();
                ww.diagonal().array() += 1.0;
                g.block(rw, cw, r, r) = (tm.u(c, d) * s) * ww;
            }
            rhs.segment(ra, nc) = rhs_amplitude(p, tm, c);
            Vector coef;
            Complex extra;
            rhs_displacement(p, tm, c, coef, extra);
            rhs.segment(rw, r) = zr.transpose() * coef + extra * lr;
        }
        const Vector y = hermitian_solve(g, -I * rhs, t);
        out.ddot_norm += (y.dot(g * y)).real();
        for (int a = 0; a < m; ++a) {
            const int c = c0 + a;
            const Vector w = y.segment(m * nc + a * r, r);
            const Vector av = y.segment(a * nc, nc);
            // z_c^H z_dot_c = Zr_c^H w
            const Complex proj = (zr.row(c).conjugate() * w)(0);
            out.dz.row(c) = (q * w).transpose();
            out.dpsi.row(c) = (av + p.psi.row(c).transpose() * proj.real()).transpose();
        }
    }
    return out;
}

DavydovDerivative to_public(const PackedDerivative& d, int m) {
    DavydovDerivative out;
    out.dA = d.dpsi.topRows(m);
    out.dB = d.dpsi.bottomRows(m);
    out.df = d.dz.topRows(m);
    out.dg = d.dz.bottomRows(m);
    out.ddot_norm = d.ddot_norm;
    out.h2 = d.h2;
    return out;
}

void check_state(const DavydovState& s, const SystemModel& model, const DiscretizedBath& bath) {
    if (s.n_cavity != model.n_cavity || s.n_modes != int(bath.size()))
        throw ValidationError("variational state does not match the model or bath");
}

} // namespace

DavydovState initialize(const SystemModel& model, const DiscretizedBath& bath, const InitialState& s,
                        int multiplicity, double noise, std::uint64_t seed) {
    model.validate();
    if (multiplicity < 1) throw ValidationError("multiplicity must be >= 1");
    if (s.cavity_fock < 0 || s.cavity_fock >= model.n_cavity)
        throw ValidationError("cavity Fock index must lie in [0, n_cavity)");
    if (noise < 0.0) throw ValidationError("noise must be non-negative");
    const int m = multiplicity, nc = model.n_cavity, nb = int(bath.size());
    DavydovState st;
    st.multiplicity = m;
    st.n_cavity = nc;
    st.n_modes = nb;
    st.A = Matrix::Zero(m, nc);
    st.B = Matrix::Zero(m, nc);
    st.f = Matrix::Zero(m, nb);
    st.g = Matrix::Zero(m, nb);

    const Vector ket = initial_ket(model, s);
    const Eigen::Vector2cd qubit(ket(s.cavity_fock), ket(nc + s.cavity_fock));
    const Eigen::Vector2cd pm = plus_minus_basis().adjoint() * qubit;
    st.A(0, s.cavity_fock) = pm(0);
    st.B(0, s.cavity_fock) = pm(1);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-noise, noise);
    auto fill = [&](Matrix& z, const Matrix& amp) {
        for (int d = 0; d < m; ++d) {
            if (amp.row(d).squaredNorm() > 0.0) continue;
            for (int k = 0; k < nb; ++k) {
                const double re = u(rng);
                const double im = u(rng);
                z(d, k) = Complex(re, im);
            }
        }
    };
    if (noise > 0.0) {
        fill(st.f, st.A);
        fill(st.g, st.B);
    }
    return st;
}

DavydovEom assemble_eom(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath, double t) {
    check_state(state, model, bath);
    const Packed p = pack(state);
    const Matrix hpm = hamiltonian_pm(model);
    const Terms tm = make_terms(p, hpm, bath, t);
    const int m = p.m;
    const Eigen::Index nc = p.psi.cols(), nb = p.z.cols();
    const Eigen::Index sec = m * (nc + nb);
    DavydovEom eom;
    eom.gram = Matrix::Zero(2 * sec, 2 * sec);
    eom.rhs.resize(2 * sec);
    for (int s = 0; s < 2; ++s) {
        const Eigen::Index base = s * sec;
        for (int a = 0; a < m; ++a) {
            const int c = s * m + a;
            const Eigen::Index ra = base + a * nc, rz = base + m * nc + a * nb;
            for (int b = 0; b < m; ++b) {
                const int d = s * m + b;
                const Complex sv = tm.s(c, d);
                const Eigen::Index ca = base + b * nc, cz = base + m * nc + b * nb;
                eom.gram.block(ra, ca, nc, nc).diagonal().setConstant(sv);
                eom.gram.block(ra, cz, nc, nb) = sv * p.psi.row(d).transpose() * p.z.row(c).conjugate();
                eom.gram.block(rz, ca, nb, nc) = sv * p.z.row(d).transpose() * p.psi.row(c).conjugate();
                Matrix zz = p.z.row(d).transpose() * p.z.row(c).conjugate();
                zz.diagonal().array() += 1.0;
                eom.gram.block(rz, cz, nb, nb) = (tm.u(c, d) * sv) * zz;
            }
            eom.rhs.segment(ra, nc) = rhs_amplitude(p, tm, c);
            Vector coef;
            Complex extra;
            rhs_displacement(p, tm, c, coef, extra);
            eom.rhs.segment(rz, nb) = p.z.transpose() * coef + extra * tm.ell;
        }
    }
    return eom;
}

DavydovDerivative solve_eom(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath,
                            double t) {
    check_state(state, model, bath);
    const Matrix hpm = hamiltonian_pm(model);
    return to_public(derivative_reduced(pack(state), hpm, hpm * hpm, bath, t), state.multiplicity);
}

DavydovDerivative solve_eom_full(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath,
                                 double t) {
    const DavydovEom eom = assemble_eom(state, model, bath, t);
    const Packed p = pack(state);
    const Matrix hpm = hamiltonian_pm(model);
    const Terms tm = make_terms(p, hpm, bath, t);
    const int m = p.m;
    const Eigen::Index nc = p.psi.cols(), nb = p.z.cols(), sec = m * (nc + nb);
    PackedDerivative d;
    d.dpsi.resize(2 * m, nc);
    d.dz.resize(2 * m, nb);
    d.h2 = h2_expectation(p, tm, hpm * hpm, bath);
    for (int s = 0; s < 2; ++s) {
        const Matrix g = eom.gram.block(s * sec, s * sec, sec, sec);
        const Vector y = hermitian_solve(g, -I * eom.rhs.segment(s * sec, sec), t);
        d.ddot_norm += (y.dot(g * y)).real();
        for (int a = 0; a < m; ++a) {
            const int c = s * m + a;
            const Vector zd = y.segment(m * nc + a * nb, nb);
            const Complex zdz = (p.z.row(c).conjugate() * zd)(0);
            d.dz.row(c) = zd.transpose();
            d.dpsi.row(c) = (y.segment(a * nc, nc) + p.psi.row(c).transpose() * zdz.real()).transpose();
        }
    }
    return to_public(d, m);
}

DavydovState step(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath, double dt,
                  DavydovDerivative* first_stage) {
    check_state(state, model, bath);
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const Matrix hpm = hamiltonian_pm(model);
    const Matrix h2pm = hpm * hpm;
    const Packed p0 = pack(state);
    const double t = state.t;
    auto shifted = [&](const PackedDerivative& k, double h) {
        Packed p = p0;
        p.psi += h * k.dpsi;
        p.z += h * k.dz;
        return p;
    };
    const PackedDerivative k1 = derivative_reduced(p0, hpm, h2pm, bath, t);
    const PackedDerivative k2 = derivative_reduced(shifted(k1, 0.5 * dt), hpm, h2pm, bath, t + 0.5 * dt);
    const PackedDerivative k3 = derivative_reduced(shifted(k2, 0.5 * dt), hpm, h2pm, bath, t + 0.5 * dt);
    const PackedDerivative k4 = derivative_reduced(shifted(k3, dt), hpm, h2pm, bath, t + dt);
    Packed p = p0;
    p.psi += (dt / 6.0) * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    p.z += (dt / 6.0) * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    if (!p.psi.allFinite() || !p.z.allFinite()) {
        std::ostringstream os;
        os << "variational step produced non-finite values at t=" << t;
        throw NumericalError(os.str());
    }
    if (first_stage) *first_stage = to_public(k1, state.multiplicity);
    DavydovState out = state;
    unpack(p, out);
    out.t = t + dt;
    return out;
}

DeviationSample deviation(const DavydovDerivative& d, double t, double omega0) {
    DeviationSample s;
    s.t = t;
    const double v = (d.h2 - d.ddot_norm) / (omega0 * omega0);
    s.sigma2 = v < 0.0 && v > -1e-10 ? 0.0 : v;
    s.degraded = s.sigma2 >= 1e-2;
    return s;
}

DeviationSample deviation(const DavydovState& state, const SystemModel& model, const DiscretizedBath& bath,
                          double t) {
    return deviation(solve_eom(state, model, bath, t), t, model.omega0);
}

SpectrumResult direct_spectrum(const DavydovState& state, const DiscretizedBath& bath) {
    const Packed p = pack(state);
    const Matrix s = overlaps(p.z, p.z);
    const Matrix u = p.psi.conjugate() * p.psi.transpose();
    Matrix w = u.cwiseProduct(s);
    // keep same-sector pairs only: <+|-> = 0
    w.topRightCorner(p.m, p.m).setZero();
    w.bottomLeftCorner(p.m, p.m).setZero();
    const Matrix wz = w * p.z;
    const Vector n = p.z.conjugate().cwiseProduct(wz).colwise().sum().transpose();
    SpectrumResult out;
    out.frequencies = bath.omegas;
    out.values = n.real();
    out.t_final = state.t;
    out.method = "multiD1";
    const double top = n.real().cwiseAbs().maxCoeff();
    out.imag_residue = top > 0.0 ? n.imag().cwiseAbs().maxCoeff() / top : 0.0;
    return out;
}

Complex transition_element(const DavydovState& bra, const DavydovState& ket, const Matrix& op) {
    const Packed a = pack(bra), b = pack(ket);
    const Matrix opm = to_plus_minus(op, bra.n_cavity);
    const Matrix s = overlaps(a.z, b.z);
    const Matrix ea = embed(a), eb = embed(b);
    const Matrix m = ea.adjoint() * (opm * eb);
    return m.cwiseProduct(s).sum();
}

Complex expectation(const DavydovState& state, const Matrix& op) { return transition_element(state, state, op); }

double norm2(const DavydovState& state) {
    return expectation(state, Matrix::Identity(2 * state.n_cavity, 2 * state.n_cavity)).real();
}

DavydovState apply_sigma_x(const DavydovState& state) {
    DavydovState out = state;
    out.B = -state.B;
    return out;
}

DavydovRun run_davydov(const SystemModel& model, const DiscretizedBath& bath, const InitialState& init,
                       const DavydovOptions& opt) {
    TimeGrid grid{opt.t_end, opt.delta, opt.dt};
    grid.validate();
    const int ns = grid.samples(), sub = grid.substeps();
    const double h = grid.step();
    const int early = int(std::lround(0.75 * double(ns - 1)));
    const Matrix sz = sigma_z(model.n_cavity), sx = sigma_x(model.n_cavity);
    const Matrix nexc = excitation_number(model.n_cavity);

    DavydovRun run;
    DavydovState st = initialize(model, bath, init, opt.multiplicity, opt.noise, opt.seed);
    for (int i = 0; i < ns; ++i) {
        st.t = double(i) * grid.delta;
        DavydovSample smp;
        smp.t = st.t;
        smp.sigma_z = expectation(st, sz).real();
        smp.sigma_x = expectation(st, sx).real();
        smp.norm = norm2(st);
        smp.excitation = expectation(st, nexc).real();
        const SpectrumResult spec = direct_spectrum(st, bath);
        smp.emitted = spec.values.sum();
        if (i == early) run.early_spectrum = spec;
        if (i == ns - 1) run.spectrum = spec;
        DavydovDerivative d;
        if (i + 1 < ns) {
            for (int s = 0; s < sub; ++s) st = step(st, model, bath, h, s == 0 ? &d : nullptr);
        } else {
            d = solve_eom(st, model, bath, st.t);
        }
        const DeviationSample dev = deviation(d, smp.t, model.omega0);
        smp.sigma2 = dev.sigma2;
        run.max_sigma2 = std::max(run.max_sigma2, dev.sigma2);
        run.samples.push_back(smp);
    }
    run.degraded = run.max_sigma2 >= 1e-2;
    run.final_state = st;
    run.spectrum.stability = relative_change(bath.omegas, run.early_spectrum.values, run.spectrum.values);
    run.spectrum.stable = run.spectrum.stability < opt.stability_threshold;
    return run;
}

OracleTrajectory exact_small_oracle(const SystemModel& model, const DiscretizedBath& bath, int fock_cut,
                                    const InitialState& s, double t_end, double delta) {
    model.validate();
    if (fock_cut < 2) throw ValidationError("bath Fock cutoff must be >= 2");
    const int nb = int(bath.size());
    long dim = 2L * model.n_cavity;
    for (int k = 0; k < nb; ++k) dim *= fock_cut;
    if (dim > 4096) throw ValidationError("oracle dimension exceeds 4096");

    auto kron = [](const Matrix& a, const Matrix& b) {
        Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    Matrix bmode = Matrix::Zero(fock_cut, fock_cut);
    for (int n = 1; n < fock_cut; ++n) bmode(n - 1, n) = std::sqrt(double(n));
    const Matrix id_mode = Matrix::Identity(fock_cut, fock_cut);
    // lift(op, slot): slot -1 is the system, 0..nb-1 are bath modes
    auto lift = [&](const Matrix& op, int slot) {
        Matrix out = slot == -1 ? op : Matrix::Identity(2 * model.n_cavity, 2 * model.n_cavity);
        for (int k = 0; k < nb; ++k) out = kron(out, k == slot ? op : id_mode);
        return out;
    };
    const Matrix sx = lift(sigma_x(model.n_cavity), -1);
    const Matrix szf = lift(sigma_z(model.n_cavity), -1);
    Matrix h = lift(build_hamiltonian(model, 1.0), -1);
    std::vector<Matrix> nk;
    for (int k = 0; k < nb; ++k) {
        const Matrix b = lift(bmode, k);
        nk.push_back(b.adjoint() * b);
        h += bath.omegas(k) * nk.back() + 0.5 * bath.couplings(k) * (b + b.adjoint()) * sx;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Matrix& v = es.eigenvectors();
    const RealVector& e = es.eigenvalues();

    Vector psi0 = Vector::Zero(dim);
    const Vector sys = initial_ket(model, s);
    long stride = 1;
    for (int k = 0; k < nb; ++k) stride *= fock_cut;
    for (Eigen::Index i = 0; i < sys.size(); ++i) psi0(i * stride) = sys(i);  // bath vacuum
    const Vector c0 = v.adjoint() * psi0;
    const Vector c1 = v.adjoint() * (sx * psi0);

    OracleTrajectory out;
    const int ns = int(std::lround(t_end / delta)) + 1;
    for (int i = 0; i < ns; ++i) {
        const double t = double(i) * delta;
        const Vector ph = (-I * t * e.cast<Complex>()).array().exp();
        const Vector psi = v * ph.cwiseProduct(c0);
        const Vector phi = v * ph.cwiseProduct(c1);
        out.times.push_back(t);
        out.sigma_z.push_back(psi.dot(szf * psi).real());
        out.sigma_x_corr.push_back(psi.dot(sx * phi));
        RealVector n(nb);
        for (int k = 0; k < nb; ++k) n(k) = psi.dot(nk[std::size_t(k)] * psi).real();
        out.photons.push_back(n);
    }
    return out;
}

} // namespace emspec
