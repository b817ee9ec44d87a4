#pragma once

#include "isid/numerics.hpp"
#include "isid/plants.hpp"
#include "isid/realization.hpp"

#include <vector>

namespace isid {

// Stage cost z^T Q z + u^T R u, terminal cost z^T Qf z.
struct QuadraticCost {
    Matrix output_weight;    // Q, m x m, PSD
    Matrix input_weight;     // R, r x r, PD
    Matrix terminal_weight;  // Qf, m x m, PSD

    void validate(int m, int r) const;
    double stage(const Vector& z, const Vector& u) const;
    double terminal(const Vector& z) const;
};

// Gains for steps first_step .. first_step + T - 1 and cost-to-go matrices
// for first_step .. first_step + T. The control law is u_t = -K_t x_t.
struct LqrPolicy {
    int first_step = 0;
    std::vector<Matrix> gains;
    std::vector<Matrix> cost_to_go;

    int window() const { return static_cast<int>(gains.size()); }
    const Matrix& gain(int t) const;
    const Matrix& cost_to_go_at(int t) const;
    double predicted_cost(const Vector& x) const;
};

// Backward Riccati recursion (square-root form) over x_{k+1} = a[k] x_k + b[k] u_k, z_k = c[k] x_k
// with k = 0..T-1 (c has T + 1 entries). Costs on z lift to C^T Q C.
// Throws RankError when R + B^T P B is not positive definite.
LqrPolicy lqr_tv(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                 const std::vector<Matrix>& c, const QuadraticCost& cost, int first_step = 0);

// Full-state LQR of the plant over steps t0..H-1.
LqrPolicy lqr_plant(const LtvSystem& sys, const QuadraticCost& cost, int t0);

// LQR on an information-state model over steps t0..H-1.
LqrPolicy lqr_info_state(const InfoStateModel& model, const QuadraticCost& cost, int t0, int horizon);

struct EquivalenceReport {
    int first_step = 0;  // q - 1
    int last_step = 0;   // H
    Matrix inputs_true;  // r x (H - q + 1), u_t for t = q-1 .. H-1
    Matrix inputs_info;
    Matrix outputs_true;  // m x (H - q + 2), z_t for t = q-1 .. H
    Matrix outputs_info;
    // Per-step differences divided by the peak norm of the true trajectory.
    std::vector<double> u_diff;
    std::vector<double> z_diff;
    double cost_true = 0.0;
    double cost_infostate = 0.0;
    double rel_gap = 0.0;  // |cost_infostate - cost_true| / cost_true

    double max_u_diff() const;
    double max_z_diff() const;
};

// Applies warmup inputs u_0..u_{q-2} to the plant from x0, then solves
// (a) full-state LQR on the plant starting from x_{q-1} and (b) LQR on the
// information-state model starting from Z_{q-1}, and runs each in closed loop
// on its own model. Costs are accumulated over t = q-1..H.
EquivalenceReport run_equivalence(const LtvSystem& sys, const InfoStateModel& model,
                                  const QuadraticCost& cost, const Vector& x0,
                                  const Matrix& warmup);

struct CostPair {
    double small = 0.0;
    double large = 0.0;
};

// Total cost from t = 0 when the plant is driven by warmup inputs up to
// u_{q-2} and then by information-state LQR of order q (fundamental ARMA
// realization, output feedback on the measured history). Evaluated for
// q_small and q_large with the same warmup, which needs q_large - 1 columns.
CostPair compare_q_lengths(const LtvSystem& sys, const QuadraticCost& cost, const Vector& x0,
                           int q_small, int q_large, const Matrix& warmup);

// Cost of the closed loop for a single order, as used by compare_q_lengths.
double info_state_closed_loop_cost(const LtvSystem& sys, const QuadraticCost& cost,
                                   const Vector& x0, int q, const Matrix& warmup);

}  // namespace isid
