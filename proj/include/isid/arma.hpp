#pragma once

#include "isid/numerics.hpp"
#include "isid/plants.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace isid {

// ARMA relation at step t, histories ordered newest first:
//
//   z_t = sum_{k=1..q} alpha_{t,t-k} z_{t-k} + sum_{k=1..q} beta_{t,t-k} u_{t-k}
//
// alpha = [alpha_{t,t-1} ... alpha_{t,t-q}] is m x mq, beta = [beta_{t,t-1} ...
// beta_{t,t-q}] is m x rq.
struct ArmaCoefficients {
    int t = 0;
    int q = 0;
    Matrix alpha;
    Matrix beta;
    double residual_norm = 0.0;
    double rhs_norm = 0.0;
    int rank_used = 0;

    int m() const { return static_cast<int>(alpha.rows()); }
    int r() const { return q > 0 ? static_cast<int>(beta.cols()) / q : 0; }
    Matrix alpha_block(int k) const;  // alpha_{t,t-k}, k = 1..q
    Matrix beta_block(int k) const;   // beta_{t,t-k}
    Matrix stacked() const;           // [alpha beta]
};

// Coefficients for every step t = q..H.
struct TvArmaModel {
    int q = 0;
    int m = 0;
    int r = 0;
    int horizon = 0;
    std::vector<ArmaCoefficients> coefficients;
    std::vector<std::string> warnings;

    int first_step() const { return q; }
    int last_step() const { return q + static_cast<int>(coefficients.size()) - 1; }
    const ArmaCoefficients& at(int t) const;
};

// Columns are rollouts. Rows of `regressors`: z_{t-1}, ..., z_{t-q}, then
// u_{t-1}, ..., u_{t-q}. `rhs` holds z_t.
struct DataMatrix {
    int t = 0;
    int q = 0;
    Matrix regressors;  // (m + r) q x N
    Matrix rhs;         // m x N
};

// Requires q <= t <= H and N > (m + r) q.
DataMatrix assemble(const RolloutBatch& batch, int t, int q);

struct OrderEstimate {
    int q_star = 0;
    int n_hat = 0;
    int deficient_q = 0;    // first q with a row-rank-deficient data matrix
    std::vector<int> ranks;  // rank for q = 1..deficient_q
};

// Raises the order until the data matrix at step t loses row rank, then
// n_hat = rank - r q and q_star is the smallest q with m q_star >= n_hat.
// Throws OrderNotSaturated when every q <= q_max gives full row rank.
OrderEstimate determine_order(const RolloutBatch& batch, int t, int q_max,
                              double tol = kDefaultRankTol);

struct OrderNotSaturated : std::runtime_error {
    OrderNotSaturated(const std::string& what, std::vector<int> rank_table)
        : std::runtime_error(what), ranks(std::move(rank_table)) {}
    std::vector<int> ranks;
};

// Minimum-norm least-squares fit from the truncated SVD of the regressors.
ArmaCoefficients fit_ls(const DataMatrix& dm, double tol = kDefaultRankTol);

// fit_ls at every step t = q..H. Adds a warning when a step's residual
// exceeds 1e-6 ||rhs||_F.
TvArmaModel fit_all(const RolloutBatch& batch, int q, double tol = kDefaultRankTol);

// Coefficients computed from the plant matrices:
//   alpha = C_t A_{t-1}...A_{t-q} pinv(O^q_{t-1})
//   beta  = [C_t B_{t-1}, ..., C_t A_{t-1}...A_{t-q+1} B_{t-q}] - alpha G^q_{t-1}
ArmaCoefficients fundamental_arma(const LtvSystem& sys, int t, int q, double tol = kDefaultRankTol);
TvArmaModel fundamental_model(const LtvSystem& sys, int q, double tol = kDefaultRankTol);

// Histories are newest first: outputs[k] = z_{t-1-k}, inputs[k] = u_{t-1-k}.
Vector predict(const ArmaCoefficients& coeffs, const std::vector<Vector>& past_outputs,
               const std::vector<Vector>& past_inputs);

// Same prediction applied to a whole data matrix (one column per rollout).
Matrix predict_columns(const ArmaCoefficients& coeffs, const Matrix& regressors);

}  // namespace isid
