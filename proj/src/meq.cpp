#include "emspec/meq.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace emspec {

namespace {

using Blocks = std::vector<Matrix>;

// Eigenbasis of the system Hamiltonian; rates(i, j) = -i (E_i - E_j).
struct Frame {
    Matrix u;
    Matrix rates;

    explicit Frame(const Matrix& h) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        u = es.eigenvectors();
        const RealVector& e = es.eigenvalues();
        const Eigen::Index n = e.size();
        rates.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) rates(i, j) = -I * (e(i) - e(j));
    }
    Matrix to(const Matrix& a) const { return u.adjoint() * a * u; }
    Matrix from(const Matrix& a) const { return u * a * u.adjoint(); }
};

// Integrating-factor RK4: the elementwise rates of each block are propagated exactly,
// the remaining coupling terms by the classical RK4 tableau.
class Lawson {
public:
    Lawson(const Blocks& rates, double h) : h_(h) {
        for (const auto& r : rates) {
            half_.push_back((r * (0.5 * h)).array().exp().matrix());
            full_.push_back((r * h).array().exp().matrix());
        }
    }

    template <class F>
    void step(Blocks& v, double t, F&& n) const {
        const std::size_t nb = v.size();
        Blocks tmp(nb);
        const Blocks k1 = n(t, v);
        for (std::size_t b = 0; b < nb; ++b) tmp[b] = half_[b].cwiseProduct(v[b] + (0.5 * h_) * k1[b]);
        const Blocks k2 = n(t + 0.5 * h_, tmp);
        for (std::size_t b = 0; b < nb; ++b) tmp[b] = half_[b].cwiseProduct(v[b]) + (0.5 * h_) * k2[b];
        const Blocks k3 = n(t + 0.5 * h_, tmp);
        for (std::size_t b = 0; b < nb; ++b)
            tmp[b] = full_[b].cwiseProduct(v[b]) + h_ * half_[b].cwiseProduct(k3[b]);
        const Blocks k4 = n(t + h_, tmp);
        for (std::size_t b = 0; b < nb; ++b)
            v[b] = full_[b].cwiseProduct(v[b]) +
                   (h_ / 6.0) * (full_[b].cwiseProduct(k1[b]) + 2.0 * half_[b].cwiseProduct(k2[b] + k3[b]) + k4[b]);
    }

private:
    double h_;
    Blocks half_, full_;
};

// Everything the right-hand sides need, expressed in the eigenframe.
struct Engine {
    const MethodSetup& setup;
    Frame frame;
    Matrix jm, jp, sx;
    std::vector<Complex> g, gamma;
    // PTBRE: Theta_l(s) = c_l o (1 - exp((rates - gamma_l) s)).
    Blocks theta_coef;

    explicit Engine(const MethodSetup& s) : setup(s), frame(s.hamiltonian) {
        jm = frame.to(s.lowering);
        jp = frame.to(s.raising);
        sx = frame.to(s.sigma_x);
        for (const auto& term : s.fit.terms) {
            g.push_back(term.g);
            gamma.push_back(term.gamma);
        }
        if (s.method == MethodKind::PTBRE) {
            for (std::size_t l = 0; l < g.size(); ++l) {
                // integral of g exp(-gamma s) exp(rates s) jm over [0, inf)
                const Matrix denom = (-frame.rates).array() + gamma[l];
                theta_coef.push_back((g[l] * jm).cwiseQuotient(denom));
            }
        }
    }

    std::size_t terms() const { return g.size(); }
    Eigen::Index dim() const { return jm.rows(); }

    Matrix decay(Complex rate) const {
        return (frame.rates.array() - rate).matrix();
    }

    Matrix theta(double s) const {
        Matrix out = Matrix::Zero(dim(), dim());
        for (std::size_t l = 0; l < terms(); ++l) out += theta_l(l, s);
        return out;
    }
    Matrix theta_l(std::size_t l, double s) const {
        const Matrix e = ((frame.rates.array() - gamma[l]) * s).exp().matrix();
        return theta_coef[l].cwiseProduct(Matrix::Ones(dim(), dim()) - e);
    }
};

// Theta(j h / 2) for j = 0 .. 2 * steps.
Blocks theta_table(const Engine& eng, double h, long steps) {
    Blocks table(std::size_t(2 * steps + 1));
    for (long j = 0; j <= 2 * steps; ++j) table[std::size_t(j)] = eng.theta(0.5 * h * double(j));
    return table;
}

const Matrix& theta_at(const Blocks& table, double s, double h) {
    const long j = std::lround(2.0 * s / h);
    return table[std::size_t(std::clamp<long>(j, 0, long(table.size()) - 1))];
}

// Relative singular-value cutoff for the PTBRE seed compression.
constexpr double kSeedRankTolerance = 1e-13;

void check_finite(const Matrix& m, double t) {
    if (!m.allFinite()) {
        std::ostringstream os;
        os << "propagation produced non-finite values at t=" << t << "; reduce dt";
        throw NumericalError(os.str());
    }
}

// Seed of a regression run at an anchor, eigenframe: Lambda = sx rho, F_l = sx aux_l, G_l = sx aux_l^H.
void seed_anchor(const Engine& eng, const DensityState& st, Matrix& lambda, Blocks& f, Blocks& gb) {
    const Matrix rho = eng.frame.to(st.rho);
    lambda = eng.sx * rho;
    f.clear();
    gb.clear();
    for (const auto& a : st.aux) {
        const Matrix ae = eng.frame.to(a);
        f.push_back(eng.sx * ae);
        gb.push_back(eng.sx * ae.adjoint());
    }
}

} // namespace

std::string to_string(MethodKind m) {
    switch (m) {
    case MethodKind::PTNZE: return "PTNZE";
    case MethodKind::SNZE: return "SNZE";
    case MethodKind::PTBRE: return "PTBRE";
    }
    return "?";
}

MethodKind method_from_string(const std::string& s) {
    if (s == "PTNZE") return MethodKind::PTNZE;
    if (s == "SNZE") return MethodKind::SNZE;
    if (s == "PTBRE") return MethodKind::PTBRE;
    throw ValidationError("unknown master-equation method: " + s);
}

MethodSetup make_setup(MethodKind method, const SystemModel& model, const Renormalization& renorm,
                       const ExponentialFit& fit) {
    model.validate();
    MethodSetup s;
    s.method = method;
    s.fit = fit;
    s.sigma_x = sigma_x(model.n_cavity);
    if (method == MethodKind::SNZE) {
        s.hamiltonian = build_hamiltonian(model, 1.0);
        s.lowering = s.sigma_x;
        s.raising = s.sigma_x;
    } else {
        s.hamiltonian = build_hamiltonian(model, renorm.eta);
        auto ops = jump_operators(model);
        s.lowering = std::move(ops.lowering);
        s.raising = std::move(ops.raising);
    }
    for (const auto& t : fit.terms)
        if (!(t.gamma.real() > 0.0)) throw ValidationError("kernel fit has a non-decaying term");
    return s;
}

void TimeGrid::validate() const {
    if (!(t_end > 0.0) || !(delta > 0.0) || !(dt > 0.0)) throw ValidationError("time grid values must be positive");
    const double n = t_end / delta;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
        throw ValidationError("sampling interval must divide the final time");
}

int TimeGrid::samples() const { return int(std::lround(t_end / delta)) + 1; }

int TimeGrid::substeps() const { return std::max(1, int(std::ceil(delta / dt - 1e-9))); }

DensityTrajectory propagate_density(const MethodSetup& setup, const Matrix& rho0, const TimeGrid& grid) {
    grid.validate();
    if (rho0.rows() != setup.hamiltonian.rows() || rho0.cols() != rho0.rows())
        throw ValidationError("initial density has the wrong dimension");
    if (std::abs(rho0.trace() - 1.0) > 1e-10) throw ValidationError("initial density must have unit trace");
    if (hermiticity_defect(rho0) > 1e-10) throw ValidationError("initial density must be Hermitian");

    const Engine eng(setup);
    const std::size_t k = eng.terms();
    const double h = grid.step();
    const int sub = grid.substeps();
    const int ns = grid.samples();
    const bool redfield = setup.method == MethodKind::PTBRE;

    DensityTrajectory traj;
    traj.method = setup.method;
    traj.reconstructed = redfield;
    traj.delta = grid.delta;
    traj.samples.reserve(std::size_t(ns));

    Blocks v{eng.frame.to(rho0)};
    Blocks rates{eng.frame.rates};
    if (!redfield) {
        for (std::size_t l = 0; l < k; ++l) {
            v.push_back(Matrix::Zero(eng.dim(), eng.dim()));
            rates.push_back(eng.decay(eng.gamma[l]));
        }
    }
    const Lawson stepper(rates, h);
    const long total_steps = long(ns - 1) * sub;
    const Blocks theta = redfield ? theta_table(eng, h, total_steps) : Blocks{};

    auto rhs = [&](double t, const Blocks& x) {
        Blocks d(x.size());
        if (redfield) {
            const Matrix& th = theta_at(theta, t, h);
            const Matrix a = th * x[0];
            const Matrix b = x[0] * th.adjoint();
            d[0] = -(eng.jp * a - a * eng.jp) + (eng.jm * b - b * eng.jm);
            return d;
        }
        Matrix r = Matrix::Zero(eng.dim(), eng.dim());
        for (std::size_t l = 0; l < k; ++l) r += x[l + 1];
        const Matrix ra = r.adjoint();
        d[0] = -(eng.jp * r - r * eng.jp) + (eng.jm * ra - ra * eng.jm);
        const Matrix src = eng.jm * x[0];
        for (std::size_t l = 0; l < k; ++l) d[l + 1] = eng.g[l] * src;
        return d;
    };

    auto record = [&](double t) {
        DensityState st;
        st.t = t;
        st.rho = eng.frame.from(v[0]);
        if (redfield) {
            for (std::size_t l = 0; l < k; ++l) st.aux.push_back(eng.frame.from(eng.theta_l(l, t) * v[0]));
        } else {
            for (std::size_t l = 0; l < k; ++l) st.aux.push_back(eng.frame.from(v[l + 1]));
        }
        const double drift = std::abs(st.rho.trace() - 1.0);
        if (t > 0.0 && drift > 1e-6 * t + 1e-10) {
            std::ostringstream os;
            os << "trace drift " << drift << " at t=" << t << " exceeds 1e-6 per unit time; reduce dt";
            throw NumericalError(os.str());
        }
        traj.samples.push_back(std::move(st));
    };

    record(0.0);
    long step_index = 0;
    for (int i = 1; i < ns; ++i) {
        for (int s = 0; s < sub; ++s, ++step_index) stepper.step(v, double(step_index) * h, rhs);
        check_finite(v[0], double(step_index) * h);
        record(double(i) * grid.delta);
    }
    return traj;
}

namespace {

// Forward regression run from a seed (eigenframe) over `count` samples starting at t0.
// With keep_states false only the correlation is filled.
std::vector<TwoTimeState> run_two_time(const Engine& eng, const Blocks& theta, const Matrix& lambda,
                                       const Blocks& f, const Blocks& gb, double t0, int count,
                                       const TimeGrid& grid, bool keep_states) {
    const std::size_t k = eng.terms();
    const double h = grid.step();
    const int sub = grid.substeps();
    const bool redfield = eng.setup.method == MethodKind::PTBRE;

    // integrated blocks: [Lambda, X_1..X_K, Y_1..Y_K] (PTBRE keeps Lambda only). F and G
    // decay freely, so they are advanced exactly and enter as a known source.
    const std::size_t kx = redfield ? 0 : k;
    Blocks v{lambda};
    Blocks rates{eng.frame.rates};
    for (std::size_t l = 0; l < kx; ++l) {
        v.push_back(Matrix::Zero(eng.dim(), eng.dim()));
        rates.push_back(eng.decay(eng.gamma[l]));
    }
    for (std::size_t l = 0; l < kx; ++l) {
        v.push_back(Matrix::Zero(eng.dim(), eng.dim()));
        rates.push_back(eng.decay(std::conj(eng.gamma[l])));
    }
    const Lawson stepper(rates, h);

    Blocks fcur = f, gcur = gb;
    Blocks f_half, f_full, g_half, g_full;
    for (std::size_t l = 0; l < k; ++l) {
        f_half.push_back((eng.decay(eng.gamma[l]) * (0.5 * h)).array().exp().matrix());
        f_full.push_back((eng.decay(eng.gamma[l]) * h).array().exp().matrix());
        g_half.push_back((eng.decay(std::conj(eng.gamma[l])) * (0.5 * h)).array().exp().matrix());
        g_full.push_back((eng.decay(std::conj(eng.gamma[l])) * h).array().exp().matrix());
    }
    // source sums at the step start, midpoint and end
    Matrix src_p[3], src_q[3];
    double step_start = 0.0;
    auto load_sources = [&]() {
        for (int j = 0; j < 3; ++j) {
            src_p[j] = Matrix::Zero(eng.dim(), eng.dim());
            src_q[j] = Matrix::Zero(eng.dim(), eng.dim());
        }
        for (std::size_t l = 0; l < k; ++l) {
            src_p[0] += fcur[l];
            src_p[1] += f_half[l].cwiseProduct(fcur[l]);
            src_p[2] += f_full[l].cwiseProduct(fcur[l]);
            src_q[0] += gcur[l];
            src_q[1] += g_half[l].cwiseProduct(gcur[l]);
            src_q[2] += g_full[l].cwiseProduct(gcur[l]);
        }
    };

    auto rhs = [&](double s, const Blocks& x) {
        Blocks d(x.size());
        const int stage = int(std::lround(2.0 * (s - step_start) / h));
        Matrix p = src_p[stage];
        Matrix q = src_q[stage];
        if (redfield) {
            const Matrix& th = theta_at(theta, s, h);
            p.noalias() += th * x[0];
            q.noalias() += x[0] * th.adjoint();
        } else {
            for (std::size_t l = 0; l < k; ++l) {
                p += x[1 + l];
                q += x[1 + k + l];
            }
            const Matrix left = eng.jm * x[0];
            const Matrix right = x[0] * eng.jp;
            for (std::size_t l = 0; l < k; ++l) {
                d[1 + l] = eng.g[l] * left;
                d[1 + k + l] = std::conj(eng.g[l]) * right;
            }
        }
        d[0] = -(eng.jp * p - p * eng.jp) + (eng.jm * q - q * eng.jm);
        return d;
    };

    std::vector<TwoTimeState> out;
    out.reserve(std::size_t(count));
    auto record = [&](double t) {
        TwoTimeState s;
        s.t_prime = t0;
        s.t = t;
        s.correlation = (eng.sx * v[0]).trace();
        if (keep_states) {
            s.lambda = eng.frame.from(v[0]);
            for (std::size_t l = 0; l < kx; ++l) {
                s.x.push_back(eng.frame.from(v[1 + l]));
                s.y.push_back(eng.frame.from(v[1 + k + l]));
            }
            for (std::size_t l = 0; l < k; ++l) {
                s.f.push_back(eng.frame.from(fcur[l]));
                s.g.push_back(eng.frame.from(gcur[l]));
            }
        }
        out.push_back(std::move(s));
    };

    record(t0);
    long step_index = 0;
    for (int i = 1; i < count; ++i) {
        for (int s = 0; s < sub; ++s, ++step_index) {
            step_start = double(step_index) * h;
            load_sources();
            stepper.step(v, step_start, rhs);
            for (std::size_t l = 0; l < k; ++l) {
                fcur[l] = f_full[l].cwiseProduct(fcur[l]);
                gcur[l] = g_full[l].cwiseProduct(gcur[l]);
            }
        }
        check_finite(v[0], t0 + double(step_index) * h);
        record(t0 + double(i) * grid.delta);
    }
    return out;
}

void check_two_time_inputs(const MethodSetup& setup, const DensityTrajectory& traj, const TimeGrid& grid) {
    grid.validate();
    if (traj.method != setup.method) throw ValidationError("density trajectory was produced by another method");
    if (std::abs(traj.delta - grid.delta) > 1e-12) throw ValidationError("trajectory and grid sampling differ");
    if (int(traj.samples.size()) < grid.samples()) throw ValidationError("density trajectory shorter than the grid");
}

} // namespace

std::vector<TwoTimeState> propagate_two_time(const MethodSetup& setup, const DensityTrajectory& traj, int anchor,
                                             const TimeGrid& grid) {
    check_two_time_inputs(setup, traj, grid);
    if (anchor < 0 || anchor >= grid.samples()) throw ValidationError("anchor lies outside the density trajectory");
    const Engine eng(setup);
    const long steps = long(grid.samples() - 1 - anchor) * grid.substeps();
    const Blocks theta = setup.method == MethodKind::PTBRE ? theta_table(eng, grid.step(), steps) : Blocks{};
    const DensityState& st = traj.samples[std::size_t(anchor)];
    Matrix lambda;
    Blocks f, gb;
    seed_anchor(eng, st, lambda, f, gb);
    return run_two_time(eng, theta, lambda, f, gb, st.t, grid.samples() - anchor, grid, true);
}

namespace {

// Adjoint of the time-invariant regression generator applied to sigma_x; column m holds
// [W_Lambda, W_X_1..K, W_Y_1..K](m delta) flattened.
Matrix adjoint_history(const Engine& eng, const TimeGrid& grid) {
    const std::size_t k = eng.terms();
    const Eigen::Index d2 = eng.dim() * eng.dim();
    const int ns = grid.samples();
    const int sub = grid.substeps();
    const double h = grid.step();

    Blocks w{eng.sx.adjoint()};
    Blocks rates{eng.frame.rates.conjugate()};
    for (std::size_t l = 0; l < k; ++l) {
        w.push_back(Matrix::Zero(eng.dim(), eng.dim()));
        rates.push_back(eng.decay(eng.gamma[l]).conjugate());
    }
    for (std::size_t l = 0; l < k; ++l) {
        w.push_back(Matrix::Zero(eng.dim(), eng.dim()));
        rates.push_back(eng.decay(std::conj(eng.gamma[l])).conjugate());
    }
    const Lawson stepper(rates, h);

    auto rhs = [&](double, const Blocks& x) {
        Blocks d(x.size());
        Matrix a = Matrix::Zero(eng.dim(), eng.dim());
        Matrix b = Matrix::Zero(eng.dim(), eng.dim());
        for (std::size_t l = 0; l < k; ++l) {
            a += std::conj(eng.g[l]) * x[1 + l];
            b += eng.g[l] * x[1 + k + l];
        }
        d[0] = eng.jp * a + b * eng.jm;
        const Matrix cx = -(eng.jm * x[0] - x[0] * eng.jm);
        const Matrix cy = eng.jp * x[0] - x[0] * eng.jp;
        for (std::size_t l = 0; l < k; ++l) {
            d[1 + l] = cx;
            d[1 + k + l] = cy;
        }
        return d;
    };

    Matrix hist(Eigen::Index(1 + 2 * k) * d2, ns);
    auto store = [&](int col) {
        for (std::size_t b = 0; b < w.size(); ++b)
            hist.col(col).segment(Eigen::Index(b) * d2, d2) = Eigen::Map<const Vector>(w[b].data(), d2);
    };
    store(0);
    for (int i = 1; i < ns; ++i) {
        for (int s = 0; s < sub; ++s) stepper.step(w, 0.0, rhs);
        check_finite(w[0], double(i) * grid.delta);
        store(i);
    }
    return hist;
}

void fill_adjoint(const Engine& eng, const DensityTrajectory& traj, const TimeGrid& grid, Matrix& out) {
    const std::size_t k = eng.terms();
    const Eigen::Index d2 = eng.dim() * eng.dim();
    const int ns = grid.samples();
    const Matrix hist = adjoint_history(eng, grid);
    constexpr int chunk = 128;
    for (int c0 = 0; c0 < ns; c0 += chunk) {
        const int cn = std::min(chunk, ns - c0);
        Matrix seeds(hist.rows(), cn);
        for (int j = 0; j < cn; ++j) {
            Matrix lambda;
            Blocks f, gb;
            seed_anchor(eng, traj.samples[std::size_t(c0 + j)], lambda, f, gb);
            seeds.col(j).segment(0, d2) = Eigen::Map<const Vector>(lambda.data(), d2);
            for (std::size_t l = 0; l < k; ++l) {
                seeds.col(j).segment(Eigen::Index(1 + l) * d2, d2) = Eigen::Map<const Vector>(f[l].data(), d2);
                seeds.col(j).segment(Eigen::Index(1 + k + l) * d2, d2) = Eigen::Map<const Vector>(gb[l].data(), d2);
            }
        }
        // lags that stay inside the grid for the earliest anchor of the chunk
        const int lags = ns - c0;
        Matrix prod(lags, cn);
        prod.noalias() = hist.leftCols(lags).adjoint() * seeds;
        for (int j = 0; j < cn; ++j) {
            const int anchor = c0 + j;
            for (int m = 0; anchor + m < ns; ++m) out(anchor + m, anchor) = prod(m, j);
        }
    }
}

} // namespace

Matrix correlation_matrix(const MethodSetup& setup, const DensityTrajectory& traj, const TimeGrid& grid,
                          int workers) {
    check_two_time_inputs(setup, traj, grid);
    const int ns = grid.samples();
    Matrix out = Matrix::Zero(ns, ns);
    if (setup.method != MethodKind::PTBRE) {
        fill_adjoint(Engine(setup), traj, grid, out);
        return out;
    }
    // The generator depends only on the lag, so G(t'+s, t') is linear in the anchor seed.
    // Seeds are compressed by a thin SVD and only the retained directions are propagated.
    const Engine eng(setup);
    const Blocks theta = theta_table(eng, grid.step(), long(ns - 1) * grid.substeps());
    const std::size_t k = eng.terms();
    const Eigen::Index d2 = eng.dim() * eng.dim();
    Matrix seeds(Eigen::Index(1 + 2 * k) * d2, ns);
    for (int a = 0; a < ns; ++a) {
        Matrix lambda;
        Blocks f, gb;
        seed_anchor(eng, traj.samples[std::size_t(a)], lambda, f, gb);
        seeds.col(a).segment(0, d2) = Eigen::Map<const Vector>(lambda.data(), d2);
        for (std::size_t l = 0; l < k; ++l) {
            seeds.col(a).segment(Eigen::Index(1 + l) * d2, d2) = Eigen::Map<const Vector>(f[l].data(), d2);
            seeds.col(a).segment(Eigen::Index(1 + k + l) * d2, d2) = Eigen::Map<const Vector>(gb[l].data(), d2);
        }
    }
    const Eigen::BDCSVD<Matrix> svd(seeds, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > kSeedRankTolerance * sv(0)) ++rank;

    // responses(m, i): correlation at lag m for seed direction i
    Matrix responses = Matrix::Zero(ns, rank);
    workers = std::max(1, workers);
    std::vector<std::string> errors(static_cast<std::size_t>(workers));
    auto job = [&](int wid) {
        try {
            for (Eigen::Index i = wid; i < rank; i += workers) {
                const Vector u = svd.matrixU().col(i) * sv(i);
                const auto block = [&](std::size_t b) {
                    return Matrix(Eigen::Map<const Matrix>(u.data() + Eigen::Index(b) * d2, eng.dim(), eng.dim()));
                };
                Blocks f, gb;
                for (std::size_t l = 0; l < k; ++l) {
                    f.push_back(block(1 + l));
                    gb.push_back(block(1 + k + l));
                }
                const auto run = run_two_time(eng, theta, block(0), f, gb, 0.0, ns, grid, false);
                for (int m = 0; m < ns; ++m) responses(m, i) = run[std::size_t(m)].correlation;
            }
        } catch (const std::exception& e) {
            errors[std::size_t(wid)] = e.what();
        }
    };
    if (workers == 1) {
        job(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(job, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalError(e);
    const Matrix coeff = svd.matrixV().leftCols(rank).adjoint();  // rank x ns
    const Matrix full = responses * coeff;                         // lag x anchor
    for (int a = 0; a < ns; ++a)
        for (int m = 0; a + m < ns; ++m) out(a + m, a) = full(m, a);
    return out;
}

} // namespace emspec
