#include "isid/plants.hpp"

#include "isid/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

namespace isid {

namespace {

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Unforced transition x_{to} = Phi(to, from) x_{from}, i.e. A_{to-1} ... A_{from}.
Matrix transition(const LtvSystem& sys, int to, int from) {
    Matrix phi = Matrix::Identity(sys.n(), sys.n());
    for (int s = from; s < to; ++s) phi = sys.A(s) * phi;
    return phi;
}

void check_order(const LtvSystem& sys, int t, int q, const char* what) {
    if (q < 1) throw RangeError(std::string(what) + ": order q must be >= 1");
    if (q > t) {
        throw RangeError(std::string(what) + ": q = " + std::to_string(q) + " exceeds t = " +
                         std::to_string(t));
    }
    if (t > sys.horizon() + 1) {
        throw RangeError(std::string(what) + ": t = " + std::to_string(t) + " beyond horizon " +
                         std::to_string(sys.horizon()));
    }
}

// Lower-triangular-ish square root: L L^T = cov for symmetric PSD cov.
Matrix psd_factor(const Matrix& cov) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal();
}

Vector draw_standard(Eigen::Index size, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
    return v;
}

struct NoiseFactors {
    Matrix process;
    Matrix measurement;
};

Rollout simulate_impl(const LtvSystem& sys, const Vector& x0, const Matrix& inputs,
                      const NoiseFactors* noise, Rng* rng) {
    const int n = sys.n();
    const int m = sys.m();
    const int r = sys.r();
    if (x0.size() != n) {
        throw ShapeError("simulate: x0 has " + std::to_string(x0.size()) + " entries, plant has n = " +
                         std::to_string(n));
    }
    if (!x0.allFinite()) throw ShapeError("simulate: x0 is not finite");
    if (inputs.rows() != r) {
        throw ShapeError("simulate: inputs are " + dims(inputs) + ", plant has r = " +
                         std::to_string(r));
    }
    const int len = static_cast<int>(inputs.cols());
    if (len > sys.horizon()) {
        throw ShapeError("simulate: " + std::to_string(len) + " inputs exceed horizon " +
                         std::to_string(sys.horizon()));
    }

    Rollout out;
    out.inputs = inputs;
    out.outputs.resize(m, len + 1);
    out.states.resize(n, len + 1);
    if (noise != nullptr) {
        out.process_noise.resize(r, len);
        out.measurement_noise.resize(m, len + 1);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    Vector e_m(m), e_r(r), u(r);
    Vector x = x0;
    Vector next(n);
    for (int t = 0; t <= len; ++t) {
        out.states.col(t) = x;
        out.outputs.col(t).noalias() = sys.C(t) * x;
        if (noise != nullptr) {
            for (int i = 0; i < m; ++i) e_m(i) = normal(*rng);
            out.measurement_noise.col(t).noalias() = noise->measurement * e_m;
            out.outputs.col(t) += out.measurement_noise.col(t);
        }
        if (t == len) break;
        u = inputs.col(t);
        if (noise != nullptr) {
            for (int i = 0; i < r; ++i) e_r(i) = normal(*rng);
            out.process_noise.col(t).noalias() = noise->process * e_r;
            u += out.process_noise.col(t);
        }
        next.noalias() = sys.A(t) * x;
        next.noalias() += sys.B(t) * u;
        x.swap(next);
    }
    return out;
}

Matrix zoh_discretize_a(const Matrix& ac, const Matrix& bc, double dt, Matrix* bd) {
    const Eigen::Index n = ac.rows();
    const Eigen::Index r = bc.cols();
    Matrix aug = Matrix::Zero(n + r, n + r);
    aug.topLeftCorner(n, n) = ac * dt;
    aug.topRightCorner(n, r) = bc * dt;
    const Matrix e = aug.exp();
    *bd = e.topRightCorner(n, r);
    return e.topLeftCorner(n, n);
}

}  // namespace

// LtvSystem -------------------------------------------------------------------

LtvSystem::LtvSystem(std::string name, std::vector<Matrix> a, std::vector<Matrix> b,
                     std::vector<Matrix> c, int horizon)
    : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
      horizon_(horizon) {
    validate();
}

LtvSystem LtvSystem::time_invariant(std::string name, Matrix a, Matrix b, Matrix c, int horizon) {
    return LtvSystem(std::move(name), {std::move(a)}, {std::move(b)}, {std::move(c)}, horizon);
}

LtvSystem LtvSystem::time_varying(std::string name, std::vector<Matrix> a, std::vector<Matrix> b,
                                  std::vector<Matrix> c) {
    if (a.empty()) throw ShapeError("LtvSystem: empty A sequence");
    const int horizon = static_cast<int>(a.size());
    return LtvSystem(std::move(name), std::move(a), std::move(b), std::move(c), horizon);
}

void LtvSystem::validate() const {
    if (horizon_ < 1) throw ShapeError("LtvSystem: horizon must be >= 1");
    if (a_.empty() || b_.empty() || c_.empty()) throw ShapeError("LtvSystem: empty matrix sequence");
    const auto h = static_cast<size_t>(horizon_);
    if (a_.size() != 1 && a_.size() != h) throw ShapeError("LtvSystem: A sequence length must be 1 or H");
    if (b_.size() != 1 && b_.size() != h) throw ShapeError("LtvSystem: B sequence length must be 1 or H");
    if (c_.size() != 1 && c_.size() != h && c_.size() != h + 1) {
        throw ShapeError("LtvSystem: C sequence length must be 1, H or H+1");
    }
    const Eigen::Index n = a_.front().rows();
    const Eigen::Index r = b_.front().cols();
    const Eigen::Index m = c_.front().rows();
    if (n < 1 || m < 1 || r < 1) throw ShapeError("LtvSystem: dimensions must be positive");
    for (size_t t = 0; t < a_.size(); ++t) {
        if (a_[t].rows() != n || a_[t].cols() != n) {
            throw ShapeError("LtvSystem: A_" + std::to_string(t) + " is " + dims(a_[t]));
        }
        if (!a_[t].allFinite()) throw ShapeError("LtvSystem: A_" + std::to_string(t) + " not finite");
    }
    for (size_t t = 0; t < b_.size(); ++t) {
        if (b_[t].rows() != n || b_[t].cols() != r) {
            throw ShapeError("LtvSystem: B_" + std::to_string(t) + " is " + dims(b_[t]));
        }
        if (!b_[t].allFinite()) throw ShapeError("LtvSystem: B_" + std::to_string(t) + " not finite");
    }
    for (size_t t = 0; t < c_.size(); ++t) {
        if (c_[t].rows() != m || c_[t].cols() != n) {
            throw ShapeError("LtvSystem: C_" + std::to_string(t) + " is " + dims(c_[t]));
        }
        if (!c_[t].allFinite()) throw ShapeError("LtvSystem: C_" + std::to_string(t) + " not finite");
    }
}

const Matrix& LtvSystem::A(int t) const {
    if (a_.size() == 1 && t >= 0) return a_.front();
    if (t < 0 || t >= horizon_) throw RangeError("LtvSystem::A: t = " + std::to_string(t) + " out of range");
    return a_[static_cast<size_t>(t)];
}

const Matrix& LtvSystem::B(int t) const {
    if (b_.size() == 1 && t >= 0) return b_.front();
    if (t < 0 || t >= horizon_) throw RangeError("LtvSystem::B: t = " + std::to_string(t) + " out of range");
    return b_[static_cast<size_t>(t)];
}

const Matrix& LtvSystem::C(int t) const {
    if (c_.size() == 1 && t >= 0) return c_.front();
    if (t < 0 || t > horizon_) throw RangeError("LtvSystem::C: t = " + std::to_string(t) + " out of range");
    return c_[std::min(static_cast<size_t>(t), c_.size() - 1)];
}

LtvSystem LtvSystem::with_horizon(int horizon) const {
    if (!is_time_invariant()) throw ShapeError("with_horizon: plant '" + name_ + "' is time-varying");
    return LtvSystem(name_, a_, b_, c_, horizon);
}

// Noise -----------------------------------------------------------------------

void NoiseSpec::validate(int m, int r) const {
    auto check = [](const Matrix& cov, int dim, const char* label) {
        if (cov.rows() != dim || cov.cols() != dim) {
            throw ShapeError(std::string("NoiseSpec: ") + label + " must be " + std::to_string(dim) +
                             "x" + std::to_string(dim) + ", got " + dims(cov));
        }
        if (!cov.allFinite()) throw ShapeError(std::string("NoiseSpec: ") + label + " not finite");
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw ShapeError(std::string("NoiseSpec: ") + label + " is not symmetric");
        }
        if (dim > 0) {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
            if (eig.eigenvalues().minCoeff() < -1e-12) {
                throw ShapeError(std::string("NoiseSpec: ") + label + " is not positive semidefinite");
            }
        }
    };
    check(process, r, "process covariance Q");
    check(measurement, m, "measurement covariance R");
}

bool NoiseSpec::is_zero() const {
    return process.cwiseAbs().maxCoeff() == 0.0 && measurement.cwiseAbs().maxCoeff() == 0.0;
}

// Simulation ------------------------------------------------------------------

Rollout simulate(const LtvSystem& sys, const Vector& x0, const Matrix& inputs) {
    return simulate_impl(sys, x0, inputs, nullptr, nullptr);
}

Rollout simulate(const LtvSystem& sys, const Vector& x0, const Matrix& inputs,
                 const NoiseSpec& noise, Rng& rng) {
    noise.validate(sys.m(), sys.r());
    const NoiseFactors factors{psd_factor(noise.process), psd_factor(noise.measurement)};
    return simulate_impl(sys, x0, inputs, &factors, &rng);
}

Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
    // splitmix64 finalizer over the three keys.
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return Rng(mix(mix(mix(seed) ^ index) ^ (stream + 0x632be59bd9b4e019ULL)));
}

Vector sample_gaussian(const Matrix& cov, Rng& rng) {
    return psd_factor(cov) * draw_standard(cov.rows(), rng);
}

RolloutBatch generate_batch(const LtvSystem& sys, int count, const InputLaw& inputs,
                            const InitLaw& init, const std::optional<NoiseSpec>& noise,
                            std::uint64_t seed) {
    if (count < 1) throw ShapeError("generate_batch: rollout count must be >= 1");
    const int n = sys.n();
    const int r = sys.r();
    const int horizon = sys.horizon();

    if (const auto* p = std::get_if<ProvidedInputs>(&inputs)) {
        if (static_cast<int>(p->per_rollout.size()) != count) {
            throw ShapeError("generate_batch: provided inputs cover " +
                             std::to_string(p->per_rollout.size()) + " rollouts, expected " +
                             std::to_string(count));
        }
    }
    if (const auto* p = std::get_if<ProvidedInit>(&init)) {
        if (static_cast<int>(p->per_rollout.size()) != count) {
            throw ShapeError("generate_batch: provided initial states cover " +
                             std::to_string(p->per_rollout.size()) + " rollouts, expected " +
                             std::to_string(count));
        }
    }

    std::optional<NoiseFactors> factors;
    if (noise) {
        noise->validate(sys.m(), r);
        factors = NoiseFactors{psd_factor(noise->process), psd_factor(noise->measurement)};
    }

    RolloutBatch batch;
    batch.m = sys.m();
    batch.r = r;
    batch.horizon = horizon;
    batch.noise = noise;
    batch.seed = seed;
    batch.plant = sys.name();
    batch.rollouts.reserve(static_cast<size_t>(count));

    for (int i = 0; i < count; ++i) {
        const auto idx = static_cast<size_t>(i);
        Rng excitation = substream(seed, idx, 0);
        Vector x0 = Vector::Zero(n);
        if (const auto* g = std::get_if<GaussianInit>(&init)) {
            x0 = g->sigma * draw_standard(n, excitation);
        } else if (const auto* p = std::get_if<ProvidedInit>(&init)) {
            x0 = p->per_rollout[idx];
        }
        Matrix u;
        if (const auto* g = std::get_if<GaussianInputs>(&inputs)) {
            u.resize(r, horizon);
            for (int t = 0; t < horizon; ++t) u.col(t) = g->sigma * draw_standard(r, excitation);
        } else {
            u = std::get<ProvidedInputs>(inputs).per_rollout[idx];
        }
        if (factors) {
            Rng noise_rng = substream(seed, idx, 1);
            batch.rollouts.push_back(simulate_impl(sys, x0, u, &*factors, &noise_rng));
        } else {
            batch.rollouts.push_back(simulate_impl(sys, x0, u, nullptr, nullptr));
        }
        if (!x0.isZero(0.0)) batch.nonzero_initial_conditions = true;
    }
    return batch;
}

// Ground truth ----------------------------------------------------------------

Matrix observability_matrix(const LtvSystem& sys, int t, int q) {
    check_order(sys, t, q, "observability_matrix");
    const int m = sys.m();
    Matrix o(m * q, sys.n());
    for (int i = 1; i <= q; ++i) {
        o.middleRows((i - 1) * m, m) = sys.C(t - i) * transition(sys, t - i, t - q);
    }
    return o;
}

Matrix forced_response_matrix(const LtvSystem& sys, int t, int q) {
    check_order(sys, t, q, "forced_response_matrix");
    const int m = sys.m();
    const int r = sys.r();
    Matrix g = Matrix::Zero(m * q, r * q);
    for (int i = 1; i <= q; ++i) {
        for (int j = i + 1; j <= q; ++j) {
            g.block((i - 1) * m, (j - 1) * r, m, r) =
                sys.C(t - i) * transition(sys, t - i, t - j + 1) * sys.B(t - j);
        }
    }
    return g;
}

std::vector<Matrix> true_markov(const LtvSystem& sys, int count) {
    if (!sys.is_time_invariant()) {
        throw ShapeError("true_markov: plant '" + sys.name() + "' is time-varying");
    }
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(std::max(count, 0)));
    Matrix ak_b = sys.B(0);
    for (int k = 0; k < count; ++k) {
        out.push_back(sys.C(0) * ak_b);
        ak_b = sys.A(0) * ak_b;
    }
    return out;
}

Matrix state_transform(const LtvSystem& sys, int t, int q) {
    // Z^q_t = O^q_t x_{t-q+1} + G^q_t U^q_t with U^q_t = (u_t, ..., u_{t-q+1});
    // the u_t column block of G is zero so only u_{t-1}..u_{t-q+1} enter.
    const int n = sys.n();
    const int m = sys.m();
    const int r = sys.r();
    if (q < 1 || q > t + 1) {
        throw RangeError("state_transform: need 1 <= q <= t + 1, got q = " + std::to_string(q) +
                         ", t = " + std::to_string(t));
    }
    const Matrix o = observability_matrix(sys, t + 1, q);
    const SvdResult o_svd = svd(o);
    if (numerical_rank(o_svd.singular_values) < n) {
        throw RankError("state_transform: observability matrix at step " + std::to_string(t) +
                        " (q = " + std::to_string(q) + ") has rank below n = " + std::to_string(n));
    }
    const Matrix o_pinv = truncated_pinv(o);
    const Matrix g = forced_response_matrix(sys, t + 1, q).rightCols(r * (q - 1));
    const Matrix phi = transition(sys, t, t - q + 1);

    Matrix tr(n, m * q + r * (q - 1));
    tr.leftCols(m * q) = phi * o_pinv;
    Matrix input_part = -phi * o_pinv * g;
    for (int j = 1; j <= q - 1; ++j) {
        input_part.middleCols((j - 1) * r, r) += transition(sys, t, t - j + 1) * sys.B(t - j);
    }
    tr.rightCols(r * (q - 1)) = input_part;
    return tr;
}

int minimal_order(int n, int m) { return (n + m - 1) / m; }

void check_uniform_observability(const LtvSystem& sys, int q, double tol) {
    for (int t = q; t <= sys.horizon(); ++t) {
        const int rank = matrix_rank(observability_matrix(sys, t, q), tol);
        if (rank < sys.n()) {
            throw RankError("plant '" + sys.name() + "' is not observable at step " +
                            std::to_string(t) + " with q = " + std::to_string(q) + " (rank " +
                            std::to_string(rank) + " < n = " + std::to_string(sys.n()) + ")");
        }
    }
}

// Benchmarks ------------------------------------------------------------------

LtvSystem make_scalar_plant(double a, double b, double c, int horizon) {
    return LtvSystem::time_invariant("scalar", Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b),
                                     Matrix::Constant(1, 1, c), horizon);
}

LtvSystem make_double_integrator(int horizon) {
    Matrix a(2, 2);
    a << 1, 1, 0, 1;
    Matrix b(2, 1);
    b << 0, 1;
    Matrix c(1, 2);
    c << 1, 0;
    return LtvSystem::time_invariant("double_integrator", a, b, c, horizon);
}

LtvSystem make_spring_mass_3dof(int horizon) {
    constexpr double k = 1.0;
    constexpr double d = 0.01;
    constexpr double dt = 1.0;
    Matrix stiff(3, 3);
    stiff << 2 * k, -k, 0, -k, 2 * k, -k, 0, -k, k;
    Matrix damp(3, 3);
    damp << 2 * d, -d, 0, -d, 2 * d, -d, 0, -d, d;

    Matrix ac = Matrix::Zero(6, 6);
    ac.topRightCorner(3, 3).setIdentity();
    ac.bottomLeftCorner(3, 3) = -stiff;
    ac.bottomRightCorner(3, 3) = -damp;
    Matrix bc = Matrix::Zero(6, 1);
    bc(3, 0) = 1.0;
    Matrix c = Matrix::Zero(2, 6);
    c(0, 0) = 1.0;
    c(1, 2) = 1.0;

    Matrix bd;
    Matrix ad = zoh_discretize_a(ac, bc, dt, &bd);
    LtvSystem sys = LtvSystem::time_invariant("spring_mass", ad, bd, c, horizon);
    check_uniform_observability(sys, minimal_order(sys.n(), sys.m()));
    return sys;
}

LtvSystem make_ltv_oscillator(int horizon) {
    constexpr double dt = 0.1;
    Matrix bc = Matrix::Zero(4, 2);
    bc(2, 0) = 1.0;
    bc(3, 1) = 1.0;
    Matrix c = Matrix::Zero(2, 4);
    c(0, 0) = 1.0;
    c(1, 1) = 1.0;

    std::vector<Matrix> as, bs;
    for (int t = 0; t < horizon; ++t) {
        const double k = 1.0 + 0.5 * std::sin(0.2 * t);
        Matrix ac = Matrix::Zero(4, 4);
        ac.topRightCorner(2, 2).setIdentity();
        ac(2, 0) = -2 * k;
        ac(2, 1) = k;
        ac(3, 0) = k;
        ac(3, 1) = -2 * k;
        Matrix bd;
        as.push_back(zoh_discretize_a(ac, bc, dt, &bd));
        bs.push_back(bd);
    }
    LtvSystem sys = LtvSystem::time_varying("oscillator", std::move(as), std::move(bs), {c});
    check_uniform_observability(sys, minimal_order(sys.n(), sys.m()));
    return sys;
}

Vector cartpole_derivative(const CartpoleParams& p, const Vector& x, double force) {
    // Lagrangian model with the pole as a uniform rod (inertia m l^2 / 3 about
    // its centre); pole centre of mass at (pos + l sin th, l cos th).
    const double total = p.cart_mass + p.pole_mass;
    const double ml = p.pole_mass * p.half_length;
    const double inertia = p.pole_mass * p.half_length * p.half_length * (4.0 / 3.0);
    const double s = std::sin(x(2));
    const double c = std::cos(x(2));
    const double w = x(3);

    const double m11 = total;
    const double m12 = ml * c;
    const double m22 = inertia;
    const double f1 = force + ml * s * w * w;
    const double f2 = ml * p.gravity * s;
    const double det = m11 * m22 - m12 * m12;

    Vector dx(4);
    dx(0) = x(1);
    dx(1) = (m22 * f1 - m12 * f2) / det;
    dx(2) = w;
    dx(3) = (m11 * f2 - m12 * f1) / det;
    return dx;
}

Vector cartpole_step(const CartpoleParams& p, const Vector& x, double force, double dt) {
    const Vector k1 = cartpole_derivative(p, x, force);
    const Vector k2 = cartpole_derivative(p, x + 0.5 * dt * k1, force);
    const Vector k3 = cartpole_derivative(p, x + 0.5 * dt * k2, force);
    const Vector k4 = cartpole_derivative(p, x + dt * k3, force);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double cartpole_energy(const CartpoleParams& p, const Vector& x) {
    const double total = p.cart_mass + p.pole_mass;
    const double ml = p.pole_mass * p.half_length;
    const double inertia = p.pole_mass * p.half_length * p.half_length * (4.0 / 3.0);
    return 0.5 * total * x(1) * x(1) + ml * std::cos(x(2)) * x(1) * x(3) +
           0.5 * inertia * x(3) * x(3) + ml * p.gravity * std::cos(x(2));
}

Rollout simulate_cartpole_nonlinear(const CartpoleParams& p, const Vector& x0,
                                    const Matrix& inputs, double dt) {
    if (!(dt > 0.0)) throw ShapeError("simulate_cartpole_nonlinear: dt must be positive");
    if (x0.size() != 4) throw ShapeError("simulate_cartpole_nonlinear: state has 4 entries");
    if (inputs.rows() != 1) throw ShapeError("simulate_cartpole_nonlinear: input is scalar");
    const int len = static_cast<int>(inputs.cols());
    Rollout out;
    out.inputs = inputs;
    out.states.resize(4, len + 1);
    out.outputs.resize(2, len + 1);
    Vector x = x0;
    for (int t = 0; t <= len; ++t) {
        out.states.col(t) = x;
        out.outputs(0, t) = x(0);
        out.outputs(1, t) = x(2);
        if (t < len) x = cartpole_step(p, x, inputs(0, t), dt);
    }
    return out;
}

CartpoleNominal hanging_nominal(int horizon) {
    Vector x0 = Vector::Zero(4);
    x0(2) = std::numbers::pi;
    return {x0, Matrix::Zero(1, horizon)};
}

LtvSystem make_cartpole_linearized(const CartpoleNominal& nominal, double dt,
                                   const CartpoleParams& p) {
    constexpr double h = 1e-6;
    const int horizon = static_cast<int>(nominal.inputs.cols());
    if (horizon < 1) throw ShapeError("make_cartpole_linearized: empty nominal input sequence");
    const Rollout ref = simulate_cartpole_nonlinear(p, nominal.x0, nominal.inputs, dt);

    std::vector<Matrix> as, bs;
    for (int t = 0; t < horizon; ++t) {
        const Vector xbar = ref.states.col(t);
        const double ubar = nominal.inputs(0, t);
        Matrix a(4, 4);
        for (int j = 0; j < 4; ++j) {
            Vector xp = xbar;
            Vector xm = xbar;
            xp(j) += h;
            xm(j) -= h;
            a.col(j) = (cartpole_step(p, xp, ubar, dt) - cartpole_step(p, xm, ubar, dt)) / (2 * h);
        }
        Matrix b(4, 1);
        b.col(0) = (cartpole_step(p, xbar, ubar + h, dt) - cartpole_step(p, xbar, ubar - h, dt)) / (2 * h);
        as.push_back(a);
        bs.push_back(b);
    }
    Matrix c = Matrix::Zero(2, 4);
    c(0, 0) = 1.0;
    c(1, 2) = 1.0;
    LtvSystem sys = LtvSystem::time_varying("cartpole", std::move(as), std::move(bs), {c});
    check_uniform_observability(sys, minimal_order(sys.n(), sys.m()));
    return sys;
}

LtvSystem make_builtin_plant(const std::string& name, int horizon) {
    if (name == "scalar") return make_scalar_plant(0.5, 1.0, 1.0, horizon > 0 ? horizon : 20);
    if (name == "double_integrator") return make_double_integrator(horizon > 0 ? horizon : 20);
    if (name == "spring_mass") return make_spring_mass_3dof(horizon > 0 ? horizon : 40);
    if (name == "oscillator") return make_ltv_oscillator(horizon > 0 ? horizon : 30);
    if (name == "cartpole") return make_cartpole_linearized(hanging_nominal(horizon > 0 ? horizon : 31));
    throw ValidationError("unknown plant '" + name + "'");
}

int default_order(const std::string& name) {
    if (name == "scalar") return 1;
    if (name == "double_integrator") return 2;
    if (name == "spring_mass" || name == "oscillator" || name == "cartpole") return 4;
    throw ValidationError("unknown plant '" + name + "'");
}

}  // namespace isid
