#include "isid/realization.hpp"

#include "isid/errors.hpp"

namespace isid {

int info_state_dim(int m, int r, int q) { return m * q + r * (q - 1); }

InfoState info_state_from_history(const std::vector<Vector>& outputs,
                                  const std::vector<Vector>& inputs, int t) {
    if (outputs.empty()) throw ShapeError("info_state_from_history: need at least one output");
    const int q = static_cast<int>(outputs.size());
    if (static_cast<int>(inputs.size()) != q - 1) {
        throw ShapeError("info_state_from_history: " + std::to_string(q) + " outputs need " +
                         std::to_string(q - 1) + " inputs, got " + std::to_string(inputs.size()));
    }
    const auto m = outputs.front().size();
    const auto r = inputs.empty() ? Eigen::Index{0} : inputs.front().size();
    InfoState s;
    s.t = t;
    s.q = q;
    s.m = static_cast<int>(m);
    s.r = static_cast<int>(r);
    s.value.resize(m * q + r * (q - 1));
    for (int k = 0; k < q; ++k) {
        if (outputs[static_cast<size_t>(k)].size() != m) throw ShapeError("info_state_from_history: output size");
        s.value.segment(k * m, m) = outputs[static_cast<size_t>(k)];
    }
    for (int k = 0; k < q - 1; ++k) {
        if (inputs[static_cast<size_t>(k)].size() != r) throw ShapeError("info_state_from_history: input size");
        s.value.segment(m * q + k * r, r) = inputs[static_cast<size_t>(k)];
    }
    return s;
}

InfoState info_state_from_rollout(const Rollout& rollout, int t, int q) {
    if (q < 1 || t - q + 1 < 0 || t >= rollout.outputs.cols()) {
        throw RangeError("info_state_from_rollout: history of order " + std::to_string(q) +
                         " ending at t = " + std::to_string(t) + " is not available");
    }
    std::vector<Vector> z;
    std::vector<Vector> u;
    for (int k = 0; k < q; ++k) z.emplace_back(rollout.outputs.col(t - k));
    for (int k = 1; k < q; ++k) u.emplace_back(rollout.inputs.col(t - k));
    InfoState s = info_state_from_history(z, u, t);
    s.r = static_cast<int>(rollout.inputs.rows());
    return s;
}

InfoStateModel::InfoStateModel(int q, int m, int r, std::vector<InfoStateStep> steps)
    : q_(q), m_(m), r_(r), steps_(std::move(steps)) {
    if (steps_.empty()) throw ShapeError("InfoStateModel: no transitions");
    const int d = dim();
    for (size_t i = 0; i < steps_.size(); ++i) {
        const InfoStateStep& s = steps_[i];
        if (i > 0 && s.t != steps_[i - 1].t + 1) {
            throw RangeError("InfoStateModel: transitions skip from t = " +
                             std::to_string(steps_[i - 1].t) + " to t = " + std::to_string(s.t));
        }
        if (s.a.rows() != d || s.a.cols() != d || s.b.rows() != d || s.b.cols() != r_) {
            throw ShapeError("InfoStateModel: transition into t = " + std::to_string(s.t) +
                             " has wrong shape");
        }
    }
}

const InfoStateStep& InfoStateModel::into(int t) const {
    if (t < steps_.front().t || t > steps_.back().t) {
        throw RangeError("InfoStateModel: no transition into t = " + std::to_string(t) + " (valid " +
                         std::to_string(steps_.front().t) + ".." + std::to_string(steps_.back().t) + ")");
    }
    return steps_[static_cast<size_t>(t - steps_.front().t)];
}

Matrix InfoStateModel::output_matrix() const {
    Matrix c = Matrix::Zero(m_, dim());
    c.leftCols(m_).setIdentity();
    return c;
}

namespace {

// Shift structure shared by every transition; first block row left at zero.
void fill_shift(int m, int r, int q, Matrix& a, Matrix& b) {
    for (int k = 1; k < q; ++k) a.block(k * m, (k - 1) * m, m, m).setIdentity();
    if (q >= 2) b.block(m * q, 0, r, r).setIdentity();
    for (int k = 2; k < q; ++k) a.block(m * q + (k - 1) * r, m * q + (k - 2) * r, r, r).setIdentity();
}

}  // namespace

InfoStateStep realize_step(const ArmaCoefficients& coeffs) {
    const int q = coeffs.q;
    const int m = coeffs.m();
    const int r = coeffs.r();
    const int d = info_state_dim(m, r, q);
    InfoStateStep s;
    s.t = coeffs.t;
    s.a = Matrix::Zero(d, d);
    s.b = Matrix::Zero(d, r);
    fill_shift(m, r, q, s.a, s.b);
    s.a.topLeftCorner(m, m * q) = coeffs.alpha;
    if (q >= 2) s.a.block(0, m * q, m, r * (q - 1)) = coeffs.beta.rightCols(r * (q - 1));
    s.b.topRows(m) = coeffs.beta.leftCols(r);
    return s;
}

InfoStateModel realize_tv(const TvArmaModel& model) {
    if (model.coefficients.empty()) throw ShapeError("realize_tv: empty ARMA model");
    std::vector<InfoStateStep> steps;
    steps.reserve(model.coefficients.size());
    int expected = model.coefficients.front().t;
    for (const ArmaCoefficients& c : model.coefficients) {
        if (c.t != expected) {
            throw RangeError("realize_tv: ARMA model is missing step t = " + std::to_string(expected));
        }
        if (c.q != model.q) throw ShapeError("realize_tv: mixed ARMA orders");
        steps.push_back(realize_step(c));
        ++expected;
    }
    InfoStateModel out(model.q, model.m, model.r, std::move(steps));
    verify_structure(out);
    return out;
}

void verify_structure(const InfoStateModel& model) {
    const int q = model.q();
    const int m = model.m();
    const int r = model.r();
    const int d = model.dim();
    for (const InfoStateStep& s : model.steps()) {
        Matrix a = Matrix::Zero(d, d);
        Matrix b = Matrix::Zero(d, r);
        fill_shift(m, r, q, a, b);
        a.topRows(m) = s.a.topRows(m);
        b.topRows(m) = s.b.topRows(m);
        if ((a.array() != s.a.array()).any() || (b.array() != s.b.array()).any()) {
            throw ShapeError("verify_structure: transition into t = " + std::to_string(s.t) +
                             " breaks the information-state shift structure");
        }
    }
}

LtiCanonicalModel realize_lti_canonical(const ArmaCoefficients& coeffs) {
    const int q = coeffs.q;
    const int m = coeffs.m();
    const int r = coeffs.r();
    LtiCanonicalModel out;
    out.q = q;
    out.m = m;
    out.r = r;
    out.a = Matrix::Zero(m * q, m * q);
    for (int k = 1; k <= q; ++k) {
        out.a.block((k - 1) * m, 0, m, m) = coeffs.alpha_block(k);
        if (k < q) out.a.block((k - 1) * m, k * m, m, m).setIdentity();
    }
    out.b.resize(m * q, r);
    for (int k = 1; k <= q; ++k) out.b.middleRows((k - 1) * m, m) = coeffs.beta_block(k);
    out.c = Matrix::Zero(m, m * q);
    out.c.leftCols(m).setIdentity();
    return out;
}

Vector canonical_state(const ArmaCoefficients& coeffs, const InfoState& info) {
    const int q = coeffs.q;
    const int m = coeffs.m();
    const int r = coeffs.r();
    if (info.q != q || info.value.size() != info_state_dim(m, r, q)) {
        throw ShapeError("canonical_state: information-state does not match the ARMA order");
    }
    auto z = [&](int s) { return info.value.segment(s * m, m); };               // z_{t-s}
    auto u = [&](int s) { return info.value.segment(m * q + (s - 1) * r, r); };  // u_{t-s}, s >= 1
    Vector x = Vector::Zero(m * q);
    x.head(m) = z(0);
    for (int k = 2; k <= q; ++k) {
        Vector xk = Vector::Zero(m);
        for (int j = k; j <= q; ++j) {
            const int s = j - k + 1;
            xk += coeffs.alpha_block(j) * z(s) + coeffs.beta_block(j) * u(s);
        }
        x.segment((k - 1) * m, m) = xk;
    }
    return x;
}

Matrix simulate_info_state(const InfoStateModel& model, const InfoState& init, const Matrix& inputs) {
    if (init.q != model.q() || init.value.size() != model.dim()) {
        throw ShapeError("simulate_info_state: initial information-state has the wrong layout");
    }
    if (inputs.rows() != model.r()) throw ShapeError("simulate_info_state: input dimension");
    const int len = static_cast<int>(inputs.cols());
    if (init.t < model.first_state_step() || init.t + len > model.last_state_step()) {
        throw RangeError("simulate_info_state: steps " + std::to_string(init.t) + ".." +
                         std::to_string(init.t + len) + " outside model range " +
                         std::to_string(model.first_state_step()) + ".." +
                         std::to_string(model.last_state_step()));
    }
    Matrix z(model.m(), len + 1);
    Vector s = init.value;
    z.col(0) = s.head(model.m());
    for (int k = 0; k < len; ++k) {
        const InfoStateStep& step = model.into(init.t + k + 1);
        s = step.a * s + step.b * inputs.col(k);
        z.col(k + 1) = s.head(model.m());
    }
    return z;
}

Matrix simulate_canonical(const LtiCanonicalModel& model, const Vector& init, const Matrix& inputs) {
    if (init.size() != model.a.rows()) throw ShapeError("simulate_canonical: initial state size");
    if (inputs.rows() != model.r) throw ShapeError("simulate_canonical: input dimension");
    const auto len = inputs.cols();
    Matrix z(model.m, len + 1);
    Vector x = init;
    z.col(0) = model.c * x;
    for (Eigen::Index k = 0; k < len; ++k) {
        x = model.a * x + model.b * inputs.col(k);
        z.col(k + 1) = model.c * x;
    }
    return z;
}

std::vector<Matrix> markov_from_arma(const ArmaCoefficients& coeffs, int count) {
    const int q = coeffs.q;
    std::vector<Matrix> y;
    y.reserve(static_cast<size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        Matrix yk = (k + 1 <= q) ? coeffs.beta_block(k + 1) : Matrix::Zero(coeffs.m(), coeffs.r());
        for (int i = 1; i <= std::min(k, q); ++i) {
            yk += coeffs.alpha_block(i) * y[static_cast<size_t>(k - i)];
        }
        y.push_back(std::move(yk));
    }
    return y;
}

std::optional<ArmaCoefficients> time_invariant_coefficients(const TvArmaModel& model,
                                                            const RolloutBatch& batch,
                                                            double rel_tol) {
    if (model.coefficients.empty()) return std::nullopt;
    ArmaCoefficients avg = model.coefficients.front();
    avg.alpha.setZero();
    avg.beta.setZero();
    for (const ArmaCoefficients& c : model.coefficients) {
        avg.alpha += c.alpha;
        avg.beta += c.beta;
    }
    const double count = static_cast<double>(model.coefficients.size());
    avg.alpha /= count;
    avg.beta /= count;
    for (const ArmaCoefficients& c : model.coefficients) {
        const DataMatrix dm = assemble(batch, c.t, model.q);
        const double resid = (dm.rhs - predict_columns(avg, dm.regressors)).norm();
        if (resid > rel_tol * dm.rhs.norm()) return std::nullopt;
    }
    avg.residual_norm = 0.0;
    return avg;
}

}  // namespace isid
