#include "isid/okid.hpp"

#include "isid/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace isid {

ObserverMarkov fit_observer_markov(const RolloutBatch& batch, int q, double tol) {
    const int m = batch.m;
    const int r = batch.r;
    const int h = batch.horizon;
    if (q < 1 || q > h) throw RangeError("fit_observer_markov: need 1 <= q <= H");
    const int rows = (r + m) * q;
    const int cols = batch.size() * (h - q + 1);
    if (cols < rows) {
        throw ShapeError("fit_observer_markov: " + std::to_string(cols) +
                         " data columns for " + std::to_string(rows) + " regressors");
    }
    Matrix v(rows, cols);
    Matrix y(m, cols);
    int col = 0;
    for (const Rollout& ro : batch.rollouts) {
        for (int t = q; t <= h; ++t, ++col) {
            for (int k = 0; k < q; ++k) {
                v.block(k * (r + m), col, r, 1) = ro.inputs.col(t - k - 1);
                v.block(k * (r + m) + r, col, m, 1) = ro.outputs.col(t - k - 1);
            }
            y.col(col) = ro.outputs.col(t);
        }
    }
    const SvdResult d = svd(v);
    const Matrix ybar = lstsq_min_norm(d, y, tol);

    ObserverMarkov om;
    om.q = q;
    om.m = m;
    om.r = r;
    om.rank_used = numerical_rank(d.singular_values, tol);
    om.columns = cols;
    om.zero_initial_conditions = !batch.nonzero_initial_conditions;
    for (int k = 0; k < q; ++k) om.blocks.push_back(ybar.middleCols(k * (r + m), r + m));
    return om;
}

std::vector<Matrix> recover_open_loop_markov(const ObserverMarkov& om, int count) {
    std::vector<Matrix> y;
    for (int k = 0; k < count; ++k) {
        Matrix yk = k < om.q ? om.input_part(k) : Matrix::Zero(om.m, om.r);
        for (int i = 1; i <= std::min(k, om.q); ++i) yk += om.output_part(i - 1) * y[static_cast<size_t>(k - i)];
        y.push_back(std::move(yk));
    }
    return y;
}

EraRealization era(const std::vector<Matrix>& markov, int order, int rows, int cols, double tol) {
    if (rows < 1 || cols < 1) throw ShapeError("era: Hankel needs at least one block row and column");
    if (static_cast<int>(markov.size()) < rows + cols) {
        throw ShapeError("era: " + std::to_string(rows) + " x " + std::to_string(cols) +
                         " block Hankel and its shift need " + std::to_string(rows + cols) +
                         " Markov parameters, got " + std::to_string(markov.size()));
    }
    const auto m = markov.front().rows();
    const auto r = markov.front().cols();
    Matrix h0(m * rows, r * cols);
    Matrix h1(m * rows, r * cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            h0.block(i * m, j * r, m, r) = markov[static_cast<size_t>(i + j)];
            h1.block(i * m, j * r, m, r) = markov[static_cast<size_t>(i + j + 1)];
        }
    }
    const SvdResult d = svd(h0);
    const int rank = numerical_rank(d.singular_values, tol);
    if (order <= 0) order = rank;
    if (order == 0 || order > rank) {
        std::ostringstream msg;
        msg << "era: order " << order << " exceeds Hankel rank " << rank << "; singular values:";
        for (Eigen::Index k = 0; k < d.singular_values.size(); ++k) msg << ' ' << d.singular_values(k);
        throw RankError(msg.str());
    }
    const Matrix u = d.left_vectors.leftCols(order);
    const Matrix v = d.right_vectors.leftCols(order);
    const Vector s = d.singular_values.head(order);
    const Vector s_half = s.cwiseSqrt();
    const Vector s_inv_half = s_half.cwiseInverse();

    EraRealization out;
    out.order = order;
    out.hankel_singular_values = d.singular_values;
    out.a = s_inv_half.asDiagonal() * (u.transpose() * h1 * v) * s_inv_half.asDiagonal();
    out.b = (s_half.asDiagonal() * v.transpose()).leftCols(r);
    out.c = (u * s_half.asDiagonal()).topRows(m);
    return out;
}

std::vector<Matrix> markov_of(const Matrix& a, const Matrix& b, const Matrix& c, int count) {
    std::vector<Matrix> out;
    Matrix ak_b = b;
    for (int k = 0; k < count; ++k) {
        out.push_back(c * ak_b);
        ak_b = a * ak_b;
    }
    return out;
}

Matrix recover_observer_gain(const EraRealization& real, const ObserverMarkov& om, double tol) {
    const int q = om.q;
    const int m = om.m;
    const int n = real.order;
    std::vector<Matrix> g;
    for (int k = 0; k < q; ++k) g.push_back(-om.output_part(k));
    std::vector<Matrix> yo;
    for (int k = 0; k < q; ++k) {
        Matrix yk = g[static_cast<size_t>(k)];
        for (int i = 0; i < k; ++i) yk -= g[static_cast<size_t>(i)] * yo[static_cast<size_t>(k - 1 - i)];
        yo.push_back(std::move(yk));
    }
    Matrix obs(m * q, n);
    Matrix stacked(m * q, m);
    Matrix ca = real.c;
    for (int k = 0; k < q; ++k) {
        obs.middleRows(k * m, m) = ca;
        ca = ca * real.a;
        stacked.middleRows(k * m, m) = yo[static_cast<size_t>(k)];
    }
    if (matrix_rank(obs, tol) < n) {
        throw RankError("recover_observer_gain: observability matrix of order " + std::to_string(q) +
                        " has rank below the realized order " + std::to_string(n));
    }
    return truncated_pinv(obs, tol) * stacked;
}

double relative_l1_error(const Matrix& estimate, const Matrix& reference) {
    const double diff = (estimate - reference).cwiseAbs().sum();
    const double ref = reference.cwiseAbs().sum();
    return ref > 0.0 ? diff / ref : diff;
}

double MismatchReport::max_openloop() const {
    return err_openloop.empty() ? 0.0 : *std::max_element(err_openloop.begin(), err_openloop.end());
}

double MismatchReport::max_observer() const {
    return err_observer.empty() ? 0.0 : *std::max_element(err_observer.begin(), err_observer.end());
}

MismatchReport mismatch_report(const EraRealization& real, const Matrix& observer_gain,
                               const ObserverMarkov& om,
                               const std::vector<Matrix>& reference_markov) {
    const int q = om.q;
    if (static_cast<int>(reference_markov.size()) < q + 1) {
        throw ShapeError("mismatch_report: need " + std::to_string(q + 1) + " reference Markov parameters");
    }
    if (observer_gain.rows() != real.order || observer_gain.cols() != om.m) {
        throw ShapeError("mismatch_report: observer gain must be order x m");
    }
    const Matrix abar = real.a + observer_gain * real.c;
    Matrix bbar(real.order, om.r + om.m);
    bbar << real.b, -observer_gain;

    MismatchReport rep;
    const std::vector<Matrix> recovered = recover_open_loop_markov(om, q + 1);
    Matrix ak_b = bbar;
    for (int k = 0; k <= q; ++k) {
        const Matrix rebuilt = real.c * ak_b;
        const Matrix fitted = k < q ? om.blocks[static_cast<size_t>(k)] : Matrix::Zero(om.m, om.r + om.m);
        rep.err_observer.push_back(relative_l1_error(rebuilt, fitted));
        rep.err_openloop.push_back(relative_l1_error(recovered[static_cast<size_t>(k)],
                                                     reference_markov[static_cast<size_t>(k)]));
        if (k == q) rep.deadbeat_residual = rebuilt.norm();
        ak_b = abar * ak_b;
    }
    if (abar.size() > 0) {
        Eigen::EigenSolver<Matrix> eig(abar, false);
        rep.max_eig_modulus = eig.eigenvalues().cwiseAbs().maxCoeff();
    }
    return rep;
}

}  // namespace isid
