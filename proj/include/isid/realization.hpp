#pragma once

#include "isid/arma.hpp"
#include "isid/numerics.hpp"

#include <optional>
#include <vector>

namespace isid {

// Information-state of order q at step t:
//   [z_t; z_{t-1}; ...; z_{t-q+1}; u_{t-1}; ...; u_{t-q+1}]
// of dimension m q + r (q - 1). For q = 1 the input block is empty.
struct InfoState {
    int t = 0;
    int q = 0;
    int m = 0;
    int r = 0;
    Vector value;
};

int info_state_dim(int m, int r, int q);

// outputs = (z_t, ..., z_{t-q+1}), inputs = (u_{t-1}, ..., u_{t-q+1}).
InfoState info_state_from_history(const std::vector<Vector>& outputs,
                                  const std::vector<Vector>& inputs, int t = 0);

// Reads the history ending at step t out of a rollout.
InfoState info_state_from_rollout(const Rollout& rollout, int t, int q);

// One transition Z_t = A Z_{t-1} + B u_{t-1}; the first block rows of A and B
// carry the ARMA coefficients of step t, the rest is shift structure.
struct InfoStateStep {
    int t = 0;
    Matrix a;
    Matrix b;
};

class InfoStateModel {
public:
    InfoStateModel(int q, int m, int r, std::vector<InfoStateStep> steps);

    int q() const { return q_; }
    int m() const { return m_; }
    int r() const { return r_; }
    int dim() const { return info_state_dim(m_, r_, q_); }
    // Information-states exist for t in [first_state_step, last_state_step].
    int first_state_step() const { return steps_.front().t - 1; }
    int last_state_step() const { return steps_.back().t; }
    // Transition from t - 1 into t.
    const InfoStateStep& into(int t) const;
    const std::vector<InfoStateStep>& steps() const { return steps_; }
    // [I_m 0].
    Matrix output_matrix() const;

private:
    int q_, m_, r_;
    std::vector<InfoStateStep> steps_;
};

InfoStateStep realize_step(const ArmaCoefficients& coeffs);

// Throws RangeError when the model skips a step.
InfoStateModel realize_tv(const TvArmaModel& model);

// Throws ShapeError when a matrix violates the shift structure. Zeros and
// identities are compared exactly.
void verify_structure(const InfoStateModel& model);

// Observer canonical form of a time-invariant ARMA model:
//   A has alpha_1..alpha_q down its first block column and identities on the
//   block super-diagonal, B = [beta_1; ...; beta_q], C = [I 0 ... 0].
struct LtiCanonicalModel {
    int q = 0;
    int m = 0;
    int r = 0;
    Matrix a;
    Matrix b;
    Matrix c;
};

LtiCanonicalModel realize_lti_canonical(const ArmaCoefficients& coeffs);

// Canonical state X_t = (X^(1)_t, ..., X^(q)_t) consistent with an
// information-state; X^(k)_t = sum_{j=k..q} alpha_j z_{t+k-1-j} + beta_j u_{t+k-1-j}
// for k >= 2 and X^(1)_t = z_t.
Vector canonical_state(const ArmaCoefficients& coeffs, const InfoState& info);

// Runs the model forward from `init` with inputs u_{t0}, ..., u_{t0+L-1};
// column k of the result is z_{t0+k} (k = 0..L).
Matrix simulate_info_state(const InfoStateModel& model, const InfoState& init, const Matrix& inputs);
Matrix simulate_canonical(const LtiCanonicalModel& model, const Vector& init, const Matrix& inputs);

// Open-loop Markov parameters from time-invariant ARMA coefficients:
//   Y_0 = beta_1,  Y_k = beta_{k+1} + sum_{i=1..k} alpha_i Y_{k-i},
// with alpha_i = beta_i = 0 for i > q.
std::vector<Matrix> markov_from_arma(const ArmaCoefficients& coeffs, int count);

// Averages the per-step coefficients of a model fitted on time-invariant data,
// but only when the average predicts every step of `batch` within rel_tol
// (relative Frobenius residual); otherwise returns nullopt.
std::optional<ArmaCoefficients> time_invariant_coefficients(const TvArmaModel& model,
                                                            const RolloutBatch& batch,
                                                            double rel_tol = 1e-6);

}  // namespace isid
