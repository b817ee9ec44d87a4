#pragma once

#include "isid/numerics.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace isid {

using Rng = std::mt19937_64;

// x_{t+1} = A_t x_t + B_t u_t,  z_t = C_t x_t.
//
// A and B hold either one matrix (time-invariant, broadcast over time) or one
// per step t = 0..H-1. C holds one matrix, H matrices (C_H repeats C_{H-1}) or
// H+1 matrices so that z_H is defined.
class LtvSystem {
public:
    static LtvSystem time_invariant(std::string name, Matrix a, Matrix b, Matrix c, int horizon);
    static LtvSystem time_varying(std::string name, std::vector<Matrix> a, std::vector<Matrix> b,
                                  std::vector<Matrix> c);

    const std::string& name() const { return name_; }
    int horizon() const { return horizon_; }
    int n() const { return static_cast<int>(a_.front().rows()); }
    int m() const { return static_cast<int>(c_.front().rows()); }
    int r() const { return static_cast<int>(b_.front().cols()); }
    bool is_time_invariant() const { return a_.size() == 1 && b_.size() == 1 && c_.size() == 1; }

    // Valid for t in [0, H-1] (any t >= 0 when time-invariant).
    const Matrix& A(int t) const;
    const Matrix& B(int t) const;
    // Valid for t in [0, H].
    const Matrix& C(int t) const;

    // Time-invariant plants only: same matrices over a different horizon.
    LtvSystem with_horizon(int horizon) const;

    const std::vector<Matrix>& a_sequence() const { return a_; }
    const std::vector<Matrix>& b_sequence() const { return b_; }
    const std::vector<Matrix>& c_sequence() const { return c_; }

private:
    LtvSystem(std::string name, std::vector<Matrix> a, std::vector<Matrix> b, std::vector<Matrix> c,
              int horizon);
    void validate() const;

    std::string name_;
    std::vector<Matrix> a_, b_, c_;
    int horizon_ = 0;
};

// Process noise enters through the control channel (r x r), measurement noise
// adds to the outputs (m x m).
struct NoiseSpec {
    Matrix process;      // Q
    Matrix measurement;  // R

    void validate(int m, int r) const;
    bool is_zero() const;
};

// One experiment. Column t of `inputs` is u_t (t = 0..L-1), column t of
// `outputs` is z_t (t = 0..L). Hidden states and noise draws are kept for
// oracle checks only.
struct Rollout {
    Matrix inputs;
    Matrix outputs;
    Matrix states;             // n x (L+1), empty when not retained
    Matrix process_noise;      // r x L, empty when noise-free
    Matrix measurement_noise;  // m x (L+1), empty when noise-free

    int length() const { return static_cast<int>(inputs.cols()); }
};

struct RolloutBatch {
    std::vector<Rollout> rollouts;
    int m = 0;
    int r = 0;
    int horizon = 0;
    std::optional<NoiseSpec> noise;
    std::uint64_t seed = 0;
    std::string plant;
    bool nonzero_initial_conditions = false;

    int size() const { return static_cast<int>(rollouts.size()); }
};

Rollout simulate(const LtvSystem& sys, const Vector& x0, const Matrix& inputs);
Rollout simulate(const LtvSystem& sys, const Vector& x0, const Matrix& inputs,
                 const NoiseSpec& noise, Rng& rng);

struct GaussianInputs {
    double sigma = 1.0;
};
struct ProvidedInputs {
    std::vector<Matrix> per_rollout;  // r x H each
};
using InputLaw = std::variant<GaussianInputs, ProvidedInputs>;

struct ZeroInit {};
struct GaussianInit {
    double sigma = 1.0;
};
struct ProvidedInit {
    std::vector<Vector> per_rollout;
};
using InitLaw = std::variant<ZeroInit, GaussianInit, ProvidedInit>;

// Rollout i draws its initial state and inputs from one substream and its
// noise from another, both derived from (seed, i) only, so results do not
// depend on generation order.
RolloutBatch generate_batch(const LtvSystem& sys, int count, const InputLaw& inputs,
                            const InitLaw& init, const std::optional<NoiseSpec>& noise,
                            std::uint64_t seed);

// Substream for rollout `index`; `stream` separates independent uses.
Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

// Draw from N(0, cov) for a symmetric PSD cov.
Vector sample_gaussian(const Matrix& cov, Rng& rng);

// O^q_{t-1}: block rows C_{t-1}A_{t-2}...A_{t-q}, ..., C_{t-q} (mq x n).
Matrix observability_matrix(const LtvSystem& sys, int t, int q);

// G^q_{t-1}: block (i, j), i, j = 1..q, is C_{t-i}A_{t-i-1}...A_{t-j+1}B_{t-j}
// for j > i and zero otherwise (mq x rq).
Matrix forced_response_matrix(const LtvSystem& sys, int t, int q);

// C A^k B for k = 0..count-1. Time-invariant plants only.
std::vector<Matrix> true_markov(const LtvSystem& sys, int count);

// T_t with x_t = T_t Z_t, where Z_t = [z_t; ...; z_{t-q+1}; u_{t-1}; ...; u_{t-q+1}]
// (n x (mq + r(q-1))). Requires q <= t + 1 and rank O = n.
Matrix state_transform(const LtvSystem& sys, int t, int q);

// Smallest q with m q >= n.
int minimal_order(int n, int m);

// Throws RankError naming the first step t in [q, H] where rank O^q_{t-1} < n.
void check_uniform_observability(const LtvSystem& sys, int q, double tol = kDefaultRankTol);

// Benchmarks ------------------------------------------------------------------

LtvSystem make_scalar_plant(double a, double b, double c, int horizon);
// A = [[1,1],[0,1]], B = [0;1], C = [1,0].
LtvSystem make_double_integrator(int horizon);

// Three unit masses chained to a wall, unit springs, 0.01 dampers, force on
// mass 1, positions of masses 1 and 3 measured, zero-order hold at dt = 1.
LtvSystem make_spring_mass_3dof(int horizon = 40);

// Two unit masses, grounded and coupled by springs of stiffness
// k_t = 1 + 0.5 sin(0.2 t), both actuated, both positions measured,
// zero-order hold at dt = 0.1 with k frozen over each step.
LtvSystem make_ltv_oscillator(int horizon = 30);

struct CartpoleParams {
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double half_length = 0.5;  // pivot to pole centre of mass
    double gravity = 9.81;
};

// State (cart position, cart velocity, pole angle from upright, angular rate).
Vector cartpole_derivative(const CartpoleParams& p, const Vector& x, double force);
// One classical Runge-Kutta step with the force held constant.
Vector cartpole_step(const CartpoleParams& p, const Vector& x, double force, double dt);
double cartpole_energy(const CartpoleParams& p, const Vector& x);

// Outputs are (cart position, pole angle).
Rollout simulate_cartpole_nonlinear(const CartpoleParams& p, const Vector& x0,
                                    const Matrix& inputs, double dt);

struct CartpoleNominal {
    Vector x0;       // defaults to the hanging equilibrium
    Matrix inputs;   // 1 x H, defaults to zero over H = 31
};

CartpoleNominal hanging_nominal(int horizon = 31);

// Central-difference linearization (step 1e-6) of the RK4 step map along the
// nominal trajectory; outputs are deviations of (cart position, pole angle).
LtvSystem make_cartpole_linearized(const CartpoleNominal& nominal = hanging_nominal(),
                                   double dt = 0.02, const CartpoleParams& p = {});

// Built-in plant by name: scalar, double_integrator, spring_mass, oscillator,
// cartpole. horizon <= 0 keeps the plant's default.
LtvSystem make_builtin_plant(const std::string& name, int horizon = 0);

// Default ARMA order used with each built-in plant.
int default_order(const std::string& name);

}  // namespace isid
