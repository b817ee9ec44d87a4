#pragma once

#include "isid/arma.hpp"
#include "isid/plants.hpp"

namespace isid {

// Sample second moments at step t, averaged over rollouts. Z stacks the
// measured z_{t-1}..z_{t-q}, U the commanded u_{t-1}..u_{t-q}.
struct CorrelationSet {
    int t = 0;
    int q = 0;
    int samples = 0;
    Matrix zz;       // E[Z Z^T], mq x mq
    Matrix zu;       // E[Z U^T], mq x rq
    Matrix uu;       // E[U U^T], rq x rq
    Matrix rhs_z;    // E[z_t Z^T] = [R_ZZ(t,t-1) ... R_ZZ(t,t-q)], m x mq
    Matrix rhs_u;    // E[z_t U^T] = [R_ZU(t,t-1) ... R_ZU(t,t-q)], m x rq
};

CorrelationSet sample_correlations(const RolloutBatch& batch, int t, int q);

// Removes the effect of known noise:
//   uu    <- uu + I (x) Q
//   zu    <- zu uu^{-1} (uu + I (x) Q)
//   zz    <- zz - I (x) R
//   rhs_u block l <- rhs_u_l uu_ll^{-1} (uu_ll + Q)
// rhs_z is unchanged (measurement noise at t is independent of the past).
// Throws RankError when uu is singular.
CorrelationSet correct_correlations(const CorrelationSet& c, const NoiseSpec& noise);

struct NoisyFit {
    ArmaCoefficients coefficients;
    bool indefinite = false;  // corrected moment matrix has a negative eigenvalue
    double min_eigenvalue = 0.0;
};

// Solves [alpha beta] M = b with M, b built from corrected correlations,
// using the truncated pseudoinverse of M.
NoisyFit fit_arma_noisy(const RolloutBatch& batch, int t, int q, const NoiseSpec& noise,
                        double tol = kDefaultRankTol);

// Same normal equations without any correction (the biased estimator).
ArmaCoefficients fit_arma_uncorrected(const RolloutBatch& batch, int t, int q,
                                      double tol = kDefaultRankTol);

}  // namespace isid
