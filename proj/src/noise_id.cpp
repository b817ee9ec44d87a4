#include "isid/noise_id.hpp"

#include "isid/errors.hpp"

namespace isid {

CorrelationSet sample_correlations(const RolloutBatch& batch, int t, int q) {
    if (q < 1 || t < q || t > batch.horizon) {
        throw RangeError("sample_correlations: need 1 <= q <= t <= H");
    }
    if (batch.size() < 1) throw ShapeError("sample_correlations: empty batch");
    const int m = batch.m;
    const int r = batch.r;
    CorrelationSet c;
    c.t = t;
    c.q = q;
    c.samples = batch.size();
    c.zz = Matrix::Zero(m * q, m * q);
    c.zu = Matrix::Zero(m * q, r * q);
    c.uu = Matrix::Zero(r * q, r * q);
    c.rhs_z = Matrix::Zero(m, m * q);
    c.rhs_u = Matrix::Zero(m, r * q);

    Vector z(m * q);
    Vector u(r * q);
    for (const Rollout& ro : batch.rollouts) {
        for (int k = 1; k <= q; ++k) {
            z.segment((k - 1) * m, m) = ro.outputs.col(t - k);
            u.segment((k - 1) * r, r) = ro.inputs.col(t - k);
        }
        const Vector zt = ro.outputs.col(t);
        c.zz.noalias() += z * z.transpose();
        c.zu.noalias() += z * u.transpose();
        c.uu.noalias() += u * u.transpose();
        c.rhs_z.noalias() += zt * z.transpose();
        c.rhs_u.noalias() += zt * u.transpose();
    }
    const double inv = 1.0 / batch.size();
    c.zz *= inv;
    c.zu *= inv;
    c.uu *= inv;
    c.rhs_z *= inv;
    c.rhs_u *= inv;
    return c;
}

CorrelationSet correct_correlations(const CorrelationSet& c, const NoiseSpec& noise) {
    const int q = c.q;
    const auto m = c.rhs_z.rows();
    const auto r = c.uu.rows() / q;
    noise.validate(static_cast<int>(m), static_cast<int>(r));

    Eigen::LDLT<Matrix> uu_dec(c.uu);
    if (uu_dec.info() != Eigen::Success || !uu_dec.isPositive() ||
        uu_dec.vectorD().minCoeff() <= 1e-14 * std::max(1.0, uu_dec.vectorD().maxCoeff())) {
        throw RankError("correct_correlations: input correlation matrix is singular; use a richer "
                        "excitation (independent inputs across time and rollouts)");
    }

    CorrelationSet out = c;
    const Matrix q_big = block_diag_repeat(noise.process, q);
    const Matrix uu_tilde = c.uu + q_big;
    // zu uu^{-1} uu_tilde = (uu^{-1} zu^T)^T uu_tilde since uu is symmetric.
    out.zu = uu_dec.solve(c.zu.transpose()).transpose() * uu_tilde;
    out.uu = uu_tilde;
    out.zz = c.zz - block_diag_repeat(noise.measurement, q);
    for (int l = 0; l < q; ++l) {
        const Matrix uu_l = c.uu.block(l * r, l * r, r, r);
        Eigen::LDLT<Matrix> dec(uu_l);
        const Matrix blk = c.rhs_u.middleCols(l * r, r);
        out.rhs_u.middleCols(l * r, r) = dec.solve(blk.transpose()).transpose() * (uu_l + noise.process);
    }
    return out;
}

namespace {

Matrix moment_matrix(const CorrelationSet& c) {
    const auto mq = c.zz.rows();
    const auto rq = c.uu.rows();
    Matrix mm(mq + rq, mq + rq);
    mm.topLeftCorner(mq, mq) = c.zz;
    mm.topRightCorner(mq, rq) = c.zu;
    mm.bottomLeftCorner(rq, mq) = c.zu.transpose();
    mm.bottomRightCorner(rq, rq) = c.uu;
    return mm;
}

ArmaCoefficients solve_normal_equations(const CorrelationSet& c, double tol) {
    const Matrix mm = moment_matrix(c);
    Matrix rhs(c.rhs_z.rows(), c.rhs_z.cols() + c.rhs_u.cols());
    rhs << c.rhs_z, c.rhs_u;
    const SvdResult d = svd(mm);
    const Matrix k = rhs * truncated_pinv(mm, tol);
    ArmaCoefficients out;
    out.t = c.t;
    out.q = c.q;
    out.alpha = k.leftCols(c.rhs_z.cols());
    out.beta = k.rightCols(c.rhs_u.cols());
    out.residual_norm = (rhs - k * mm).norm();
    out.rhs_norm = rhs.norm();
    out.rank_used = numerical_rank(d.singular_values, tol);
    return out;
}

}  // namespace

NoisyFit fit_arma_noisy(const RolloutBatch& batch, int t, int q, const NoiseSpec& noise, double tol) {
    const CorrelationSet corrected = correct_correlations(sample_correlations(batch, t, q), noise);
    NoisyFit fit;
    fit.coefficients = solve_normal_equations(corrected, tol);
    const Matrix mm = moment_matrix(corrected);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (mm + mm.transpose()), Eigen::EigenvaluesOnly);
    fit.min_eigenvalue = eig.eigenvalues().minCoeff();
    fit.indefinite = fit.min_eigenvalue < -tol * std::abs(eig.eigenvalues().maxCoeff());
    return fit;
}

ArmaCoefficients fit_arma_uncorrected(const RolloutBatch& batch, int t, int q, double tol) {
    return solve_normal_equations(sample_correlations(batch, t, q), tol);
}

}  // namespace isid
