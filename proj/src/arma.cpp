#include "isid/arma.hpp"

#include "isid/errors.hpp"

#include <sstream>

namespace isid {

Matrix ArmaCoefficients::alpha_block(int k) const {
    if (k < 1 || k > q) throw RangeError("alpha_block: k out of range");
    return alpha.middleCols((k - 1) * m(), m());
}

Matrix ArmaCoefficients::beta_block(int k) const {
    if (k < 1 || k > q) throw RangeError("beta_block: k out of range");
    return beta.middleCols((k - 1) * r(), r());
}

Matrix ArmaCoefficients::stacked() const {
    Matrix out(alpha.rows(), alpha.cols() + beta.cols());
    out << alpha, beta;
    return out;
}

const ArmaCoefficients& TvArmaModel::at(int t) const {
    if (t < first_step() || t > last_step()) {
        throw RangeError("TvArmaModel: no coefficients for t = " + std::to_string(t) + " (valid " +
                         std::to_string(first_step()) + ".." + std::to_string(last_step()) + ")");
    }
    return coefficients[static_cast<size_t>(t - q)];
}

namespace {

Matrix stack_regressors(const RolloutBatch& batch, int t, int q) {
    const int m = batch.m;
    const int r = batch.r;
    const int count = batch.size();
    Matrix x(q * (m + r), count);
    for (int i = 0; i < count; ++i) {
        const Rollout& ro = batch.rollouts[static_cast<size_t>(i)];
        for (int k = 1; k <= q; ++k) {
            x.block((k - 1) * m, i, m, 1) = ro.outputs.col(t - k);
            x.block(q * m + (k - 1) * r, i, r, 1) = ro.inputs.col(t - k);
        }
    }
    return x;
}

}  // namespace

DataMatrix assemble(const RolloutBatch& batch, int t, int q) {
    if (q < 1) throw RangeError("assemble: order q must be >= 1");
    if (t < q || t > batch.horizon) {
        throw RangeError("assemble: need q <= t <= H, got q = " + std::to_string(q) + ", t = " +
                         std::to_string(t) + ", H = " + std::to_string(batch.horizon));
    }
    const int needed = (batch.m + batch.r) * q;
    if (batch.size() <= needed) {
        throw ShapeError("assemble: " + std::to_string(batch.size()) +
                         " rollouts, need more than (m + r) q = " + std::to_string(needed));
    }
    for (const Rollout& ro : batch.rollouts) {
        if (ro.outputs.cols() <= t || ro.inputs.cols() < t) {
            throw ShapeError("assemble: rollout shorter than step " + std::to_string(t));
        }
    }
    DataMatrix dm;
    dm.t = t;
    dm.q = q;
    dm.regressors = stack_regressors(batch, t, q);
    dm.rhs.resize(batch.m, batch.size());
    for (int i = 0; i < batch.size(); ++i) dm.rhs.col(i) = batch.rollouts[static_cast<size_t>(i)].outputs.col(t);
    return dm;
}

OrderEstimate determine_order(const RolloutBatch& batch, int t, int q_max, double tol) {
    if (q_max < 1 || q_max > t) {
        throw RangeError("determine_order: need 1 <= q_max <= t, got q_max = " +
                         std::to_string(q_max) + ", t = " + std::to_string(t));
    }
    OrderEstimate est;
    for (int q = 1; q <= q_max; ++q) {
        const DataMatrix dm = assemble(batch, t, q);
        const int rank = matrix_rank(dm.regressors, tol);
        est.ranks.push_back(rank);
        if (rank < (batch.m + batch.r) * q) {
            est.deficient_q = q;
            est.n_hat = rank - batch.r * q;
            est.q_star = std::max(1, minimal_order(std::max(est.n_hat, 0), batch.m));
            return est;
        }
    }
    std::ostringstream msg;
    msg << "determine_order: data matrix at t = " << t << " keeps full row rank up to q = " << q_max
        << "; ranks:";
    for (size_t i = 0; i < est.ranks.size(); ++i) msg << " q=" << i + 1 << ":" << est.ranks[i];
    throw OrderNotSaturated(msg.str(), est.ranks);
}

ArmaCoefficients fit_ls(const DataMatrix& dm, double tol) {
    const auto m = dm.rhs.rows();
    const auto p = dm.regressors.rows();
    if (dm.q < 1 || p % dm.q != 0 || p / dm.q <= m) {
        throw ShapeError("fit_ls: regressor rows do not match (m + r) q layout");
    }
    const SvdResult d = svd(dm.regressors);
    const Matrix k = lstsq_min_norm(d, dm.rhs, tol);

    ArmaCoefficients c;
    c.t = dm.t;
    c.q = dm.q;
    c.alpha = k.leftCols(m * dm.q);
    c.beta = k.rightCols(p - m * dm.q);
    c.residual_norm = (dm.rhs - k * dm.regressors).norm();
    c.rhs_norm = dm.rhs.norm();
    c.rank_used = numerical_rank(d.singular_values, tol);
    return c;
}

TvArmaModel fit_all(const RolloutBatch& batch, int q, double tol) {
    TvArmaModel model;
    model.q = q;
    model.m = batch.m;
    model.r = batch.r;
    model.horizon = batch.horizon;
    for (int t = q; t <= batch.horizon; ++t) {
        ArmaCoefficients c = fit_ls(assemble(batch, t, q), tol);
        if (c.residual_norm > 1e-6 * c.rhs_norm) {
            std::ostringstream w;
            w << "t = " << t << ": residual " << c.residual_norm << " exceeds 1e-6 ||rhs|| ("
              << c.rhs_norm << "); data may be noisy, nonlinear, or m q < n";
            model.warnings.push_back(w.str());
        }
        model.coefficients.push_back(std::move(c));
    }
    return model;
}

ArmaCoefficients fundamental_arma(const LtvSystem& sys, int t, int q, double tol) {
    if (t > sys.horizon()) {
        throw RangeError("fundamental_arma: t = " + std::to_string(t) + " beyond horizon");
    }
    const Matrix o = observability_matrix(sys, t, q);
    if (matrix_rank(o, tol) < sys.n()) {
        throw RankError("fundamental_arma: observability matrix O^" + std::to_string(q) + "_" +
                        std::to_string(t - 1) + " has rank below n = " + std::to_string(sys.n()));
    }
    const Matrix g = forced_response_matrix(sys, t, q);
    const int r = sys.r();

    // C_t A_{t-1} ... A_{t-k} for k = 0..q, built incrementally.
    Matrix head = sys.C(t);
    Matrix impulse(sys.m(), r * q);
    for (int k = 1; k <= q; ++k) {
        impulse.middleCols((k - 1) * r, r) = head * sys.B(t - k);
        head = head * sys.A(t - k);
    }

    ArmaCoefficients c;
    c.t = t;
    c.q = q;
    c.alpha = head * truncated_pinv(o, tol);
    c.beta = impulse - c.alpha * g;
    return c;
}

TvArmaModel fundamental_model(const LtvSystem& sys, int q, double tol) {
    TvArmaModel model;
    model.q = q;
    model.m = sys.m();
    model.r = sys.r();
    model.horizon = sys.horizon();
    for (int t = q; t <= sys.horizon(); ++t) model.coefficients.push_back(fundamental_arma(sys, t, q, tol));
    return model;
}

Vector predict(const ArmaCoefficients& coeffs, const std::vector<Vector>& past_outputs,
               const std::vector<Vector>& past_inputs) {
    const int q = coeffs.q;
    if (static_cast<int>(past_outputs.size()) != q || static_cast<int>(past_inputs.size()) != q) {
        throw ShapeError("predict: expected " + std::to_string(q) + " past outputs and inputs, got " +
                         std::to_string(past_outputs.size()) + " and " +
                         std::to_string(past_inputs.size()));
    }
    Vector z = Vector::Zero(coeffs.m());
    for (int k = 1; k <= q; ++k) {
        const Vector& y = past_outputs[static_cast<size_t>(k - 1)];
        const Vector& u = past_inputs[static_cast<size_t>(k - 1)];
        if (y.size() != coeffs.m() || u.size() != coeffs.r()) throw ShapeError("predict: history vector size");
        z += coeffs.alpha_block(k) * y + coeffs.beta_block(k) * u;
    }
    return z;
}

Matrix predict_columns(const ArmaCoefficients& coeffs, const Matrix& regressors) {
    if (regressors.rows() != coeffs.alpha.cols() + coeffs.beta.cols()) {
        throw ShapeError("predict_columns: regressor rows do not match coefficients");
    }
    return coeffs.alpha * regressors.topRows(coeffs.alpha.cols()) +
           coeffs.beta * regressors.bottomRows(coeffs.beta.cols());
}

}  // namespace isid
