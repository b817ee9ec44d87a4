#pragma once

#include "isid/numerics.hpp"
#include "isid/plants.hpp"

#include <vector>

namespace isid {

// Observer Markov parameters Ybar_k = C Abar^k [B, -M], k = 0..q-1, with
// Abar = A + M C. In ARMA terms Ybar_k = [beta_{k+1}, alpha_{k+1}].
struct ObserverMarkov {
    int q = 0;
    int m = 0;
    int r = 0;
    std::vector<Matrix> blocks;  // m x (r + m)
    int rank_used = 0;
    int columns = 0;
    bool zero_initial_conditions = true;

    Matrix input_part(int k) const { return blocks[static_cast<size_t>(k)].leftCols(r); }
    Matrix output_part(int k) const { return blocks[static_cast<size_t>(k)].rightCols(m); }
};

// Least-squares fit of z_t on [u_{t-1}; z_{t-1}; ...; u_{t-q}; z_{t-q}],
// pooling t = q..H over all rollouts. Throws ShapeError when there are fewer
// columns than regressor rows.
ObserverMarkov fit_observer_markov(const RolloutBatch& batch, int q, double tol = kDefaultRankTol);

// Y_0 = beta_1, Y_k = beta_{k+1} + sum_{i=1..k} alpha_i Y_{k-i} (zero beyond q).
std::vector<Matrix> recover_open_loop_markov(const ObserverMarkov& om, int count);

struct EraRealization {
    Matrix a;
    Matrix b;
    Matrix c;
    int order = 0;
    Vector hankel_singular_values;
};

// Block Hankel H0(i, j) = Y_{i+j}, H1(i, j) = Y_{i+j+1} with `rows` x `cols`
// blocks; needs rows + cols Markov parameters. order <= 0 selects the
// numerical rank. Throws RankError when order exceeds the rank of H0.
EraRealization era(const std::vector<Matrix>& markov, int order, int rows, int cols,
                   double tol = kDefaultRankTol);

// C A^k B, k = 0..count-1.
std::vector<Matrix> markov_of(const Matrix& a, const Matrix& b, const Matrix& c, int count);

// Observer gain from the observer-gain Markov parameters
//   Y°_0 = G_0, Y°_k = G_k - sum_{i<k} G_i Y°_{k-1-i},  G_k = -alpha_{k+1},
// as M = pinv(O_q) [Y°_0; ...; Y°_{q-1}] with O_q built from (A, C).
// Throws RankError when O_q lacks full column rank.
Matrix recover_observer_gain(const EraRealization& real, const ObserverMarkov& om,
                             double tol = kDefaultRankTol);

struct MismatchReport {
    // Index k = 0..q.
    std::vector<double> err_openloop;  // recovered open-loop Y_k vs reference
    std::vector<double> err_observer;  // C (A + M C)^k [B, -M] vs fitted Ybar_k
    double deadbeat_residual = 0.0;    // ||C (A + M C)^q [B, -M]||_F
    double max_eig_modulus = 0.0;      // spectral radius of A + M C

    double max_openloop() const;
    double max_observer() const;
};

// Both curves use the entrywise 1-norm of the difference over the entrywise
// 1-norm of the reference (absolute when the reference is zero). Ybar_q is
// zero for a q-term fit. reference_markov needs at least q + 1 entries.
MismatchReport mismatch_report(const EraRealization& real, const Matrix& observer_gain,
                               const ObserverMarkov& om,
                               const std::vector<Matrix>& reference_markov);

// Entrywise relative 1-norm error used by the report.
double relative_l1_error(const Matrix& estimate, const Matrix& reference);

}  // namespace isid
