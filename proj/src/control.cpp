#include "isid/control.hpp"

#include "isid/arma.hpp"
#include "isid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace isid {

namespace {

void check_symmetric_psd(const Matrix& m, const char* what, bool strict) {
    if (m.rows() != m.cols()) throw ShapeError(std::string("QuadraticCost: ") + what + " not square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError(std::string("QuadraticCost: ") + what + " not symmetric");
    }
    if (m.size() == 0) return;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (strict ? lo <= 0.0 : lo < -1e-12) {
        throw ValidationError(std::string("QuadraticCost: ") + what +
                              (strict ? " must be positive definite" : " must be positive semidefinite"));
    }
}

}  // namespace

void QuadraticCost::validate(int m, int r) const {
    if (output_weight.rows() != m || terminal_weight.rows() != m || input_weight.rows() != r) {
        throw ShapeError("QuadraticCost: weights do not match m = " + std::to_string(m) +
                         ", r = " + std::to_string(r));
    }
    check_symmetric_psd(output_weight, "output weight", false);
    check_symmetric_psd(terminal_weight, "terminal weight", false);
    check_symmetric_psd(input_weight, "input weight", true);
}

double QuadraticCost::stage(const Vector& z, const Vector& u) const {
    return z.dot(output_weight * z) + u.dot(input_weight * u);
}

double QuadraticCost::terminal(const Vector& z) const { return z.dot(terminal_weight * z); }

const Matrix& LqrPolicy::gain(int t) const {
    if (t < first_step || t >= first_step + window()) {
        throw RangeError("LqrPolicy: no gain at t = " + std::to_string(t));
    }
    return gains[static_cast<size_t>(t - first_step)];
}

const Matrix& LqrPolicy::cost_to_go_at(int t) const {
    if (t < first_step || t > first_step + window()) {
        throw RangeError("LqrPolicy: no cost-to-go at t = " + std::to_string(t));
    }
    return cost_to_go[static_cast<size_t>(t - first_step)];
}

double LqrPolicy::predicted_cost(const Vector& x) const { return x.dot(cost_to_go.front() * x); }

namespace {

// Symmetric square root of a PSD matrix, negative rounding clipped to zero.
Matrix psd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

// Square-root (array) form: with P_{t+1} = S^T S, the QR factorization of
//   [ R^{1/2}    0       ]      [ X  Y ]
//   [ S B_t      S A_t   ]  ->  [ 0  S']
//   [ 0        Q^{1/2} C_t ]
// gives X^T X = R + B^T P B, X^T Y = B^T P A, K_t = X^{-1} Y and P_t = S'^T S'.
LqrPolicy lqr_tv(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                 const std::vector<Matrix>& c, const QuadraticCost& cost, int first_step) {
    const size_t len = a.size();
    if (b.size() != len || c.size() != len + 1) {
        throw ShapeError("lqr_tv: need T matrices A and B and T + 1 matrices C");
    }
    const auto m = c.front().rows();
    const auto r = len > 0 ? b.front().cols() : cost.input_weight.rows();
    cost.validate(static_cast<int>(m), static_cast<int>(r));
    for (size_t k = 0; k < len; ++k) {
        const auto n = a[k].rows();
        if (a[k].cols() != n || b[k].rows() != n || b[k].cols() != r || c[k].cols() != n ||
            c[k].rows() != m || c[k + 1].cols() != a[k].rows()) {
            throw ShapeError("lqr_tv: inconsistent shapes at window step " + std::to_string(k));
        }
    }

    const Matrix q_half = psd_sqrt(cost.output_weight);
    const Matrix r_half = Eigen::LLT<Matrix>(cost.input_weight).matrixU();
    LqrPolicy pol;
    pol.first_step = first_step;
    pol.gains.resize(len);
    pol.cost_to_go.resize(len + 1);
    Matrix s = psd_sqrt(cost.terminal_weight) * c[len];
    pol.cost_to_go[len] = s.transpose() * s;
    for (size_t k = len; k-- > 0;) {
        const auto n = a[k].cols();
        const auto rows = std::max(r + s.rows() + m, r + n);
        Matrix arr = Matrix::Zero(rows, r + n);
        arr.topLeftCorner(r, r) = r_half;
        arr.block(r, 0, s.rows(), r) = s * b[k];
        arr.block(r, r, s.rows(), n) = s * a[k];
        arr.block(r + s.rows(), r, m, n) = q_half * c[k];
        const Eigen::HouseholderQR<Matrix> qr(arr);
        const Matrix upper = qr.matrixQR().topRows(r + n).triangularView<Eigen::Upper>();
        const Matrix x = upper.topLeftCorner(r, r);
        const double scale = std::max(x.cwiseAbs().maxCoeff(), 1.0);
        if ((x.diagonal().cwiseAbs().array() <= 1e-14 * scale).any()) {
            throw RankError("lqr_tv: R + B^T P B is not positive definite at t = " +
                            std::to_string(first_step + static_cast<int>(k)));
        }
        pol.gains[k] = x.triangularView<Eigen::Upper>().solve(upper.topRightCorner(r, n));
        s = upper.bottomRightCorner(n, n);
        pol.cost_to_go[k] = s.transpose() * s;
    }
    return pol;
}

LqrPolicy lqr_plant(const LtvSystem& sys, const QuadraticCost& cost, int t0) {
    const int h = sys.horizon();
    if (t0 < 0 || t0 > h) throw RangeError("lqr_plant: start step outside [0, H]");
    std::vector<Matrix> a, b, c;
    for (int t = t0; t < h; ++t) {
        a.push_back(sys.A(t));
        b.push_back(sys.B(t));
        c.push_back(sys.C(t));
    }
    c.push_back(sys.C(h));
    return lqr_tv(a, b, c, cost, t0);
}

LqrPolicy lqr_info_state(const InfoStateModel& model, const QuadraticCost& cost, int t0, int horizon) {
    if (t0 < model.first_state_step() || horizon > model.last_state_step()) {
        throw RangeError("lqr_info_state: model covers information-states " +
                         std::to_string(model.first_state_step()) + ".." +
                         std::to_string(model.last_state_step()) + ", control needs " +
                         std::to_string(t0) + ".." + std::to_string(horizon));
    }
    std::vector<Matrix> a, b, c;
    const Matrix out = model.output_matrix();
    for (int t = t0; t < horizon; ++t) {
        const InfoStateStep& s = model.into(t + 1);
        a.push_back(s.a);
        b.push_back(s.b);
        c.push_back(out);
    }
    c.push_back(out);
    return lqr_tv(a, b, c, cost, t0);
}

double EquivalenceReport::max_u_diff() const {
    return u_diff.empty() ? 0.0 : *std::max_element(u_diff.begin(), u_diff.end());
}

double EquivalenceReport::max_z_diff() const {
    return z_diff.empty() ? 0.0 : *std::max_element(z_diff.begin(), z_diff.end());
}

namespace {

struct Warmup {
    std::vector<Vector> states;   // x_0 .. x_{k}
    std::vector<Vector> outputs;  // z_0 .. z_{k}
    double cost = 0.0;
};

// Drives the plant with the first `steps` warmup columns.
Warmup apply_warmup(const LtvSystem& sys, const QuadraticCost& cost, const Vector& x0,
                    const Matrix& warmup, int steps) {
    Warmup w;
    Vector x = x0;
    w.states.push_back(x);
    w.outputs.emplace_back(sys.C(0) * x);
    for (int t = 0; t < steps; ++t) {
        const Vector u = warmup.col(t);
        w.cost += cost.stage(w.outputs.back(), u);
        x = sys.A(t) * x + sys.B(t) * u;
        w.states.push_back(x);
        w.outputs.emplace_back(sys.C(t + 1) * x);
    }
    return w;
}

double peak_norm(const Matrix& m) {
    double peak = 0.0;
    for (Eigen::Index k = 0; k < m.cols(); ++k) peak = std::max(peak, m.col(k).norm());
    return peak;
}

std::vector<double> relative_differences(const Matrix& ref, const Matrix& other) {
    const double scale = peak_norm(ref);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < ref.cols(); ++k) {
        const double d = (ref.col(k) - other.col(k)).norm();
        out.push_back(scale > 0.0 ? d / scale : d);
    }
    return out;
}

void check_warmup(const LtvSystem& sys, const Matrix& warmup, int needed) {
    if (warmup.rows() != sys.r() || warmup.cols() < needed) {
        throw ShapeError("warmup: need an r x " + std::to_string(needed) + " matrix of inputs, got " +
                         std::to_string(warmup.rows()) + " x " + std::to_string(warmup.cols()));
    }
}

}  // namespace

EquivalenceReport run_equivalence(const LtvSystem& sys, const InfoStateModel& model,
                                  const QuadraticCost& cost, const Vector& x0,
                                  const Matrix& warmup) {
    const int q = model.q();
    const int h = sys.horizon();
    if (model.m() != sys.m() || model.r() != sys.r()) {
        throw ShapeError("run_equivalence: model and plant dimensions differ");
    }
    if (x0.size() != sys.n()) throw ShapeError("run_equivalence: x0 has the wrong size");
    check_warmup(sys, warmup, q - 1);
    if (q - 1 > h) throw RangeError("run_equivalence: horizon shorter than the warmup");
    const int t0 = q - 1;
    const int len = h - t0;

    const Warmup w = apply_warmup(sys, cost, x0, warmup, t0);
    const LqrPolicy plant_pol = lqr_plant(sys, cost, t0);
    const LqrPolicy info_pol = lqr_info_state(model, cost, t0, h);

    EquivalenceReport rep;
    rep.first_step = t0;
    rep.last_step = h;
    rep.inputs_true.resize(sys.r(), len);
    rep.inputs_info.resize(sys.r(), len);
    rep.outputs_true.resize(sys.m(), len + 1);
    rep.outputs_info.resize(sys.m(), len + 1);

    Vector x = w.states.back();
    rep.outputs_true.col(0) = sys.C(t0) * x;
    for (int k = 0; k < len; ++k) {
        const int t = t0 + k;
        const Vector u = -plant_pol.gain(t) * x;
        rep.inputs_true.col(k) = u;
        rep.cost_true += cost.stage(rep.outputs_true.col(k), u);
        x = sys.A(t) * x + sys.B(t) * u;
        rep.outputs_true.col(k + 1) = sys.C(t + 1) * x;
    }
    rep.cost_true += cost.terminal(rep.outputs_true.col(len));

    std::vector<Vector> zs;
    std::vector<Vector> us;
    for (int k = 0; k < q; ++k) zs.push_back(w.outputs[static_cast<size_t>(t0 - k)]);
    for (int k = 1; k < q; ++k) us.emplace_back(warmup.col(t0 - k));
    Vector s = info_state_from_history(zs, us, t0).value;
    rep.outputs_info.col(0) = s.head(sys.m());
    for (int k = 0; k < len; ++k) {
        const int t = t0 + k;
        const Vector u = -info_pol.gain(t) * s;
        rep.inputs_info.col(k) = u;
        rep.cost_infostate += cost.stage(rep.outputs_info.col(k), u);
        const InfoStateStep& step = model.into(t + 1);
        s = step.a * s + step.b * u;
        rep.outputs_info.col(k + 1) = s.head(sys.m());
    }
    rep.cost_infostate += cost.terminal(rep.outputs_info.col(len));

    rep.u_diff = relative_differences(rep.inputs_true, rep.inputs_info);
    rep.z_diff = relative_differences(rep.outputs_true, rep.outputs_info);
    const double gap = std::abs(rep.cost_infostate - rep.cost_true);
    rep.rel_gap = rep.cost_true > 0.0 ? gap / rep.cost_true : gap;
    return rep;
}

double info_state_closed_loop_cost(const LtvSystem& sys, const QuadraticCost& cost,
                                   const Vector& x0, int q, const Matrix& warmup) {
    if (q < 1 || sys.m() * q < sys.n()) {
        throw RangeError("info_state_closed_loop_cost: order q = " + std::to_string(q) +
                         " violates m q >= n");
    }
    if (x0.size() != sys.n()) throw ShapeError("info_state_closed_loop_cost: x0 has the wrong size");
    check_warmup(sys, warmup, q - 1);
    const int h = sys.horizon();
    const int t0 = q - 1;
    if (t0 > h) throw RangeError("info_state_closed_loop_cost: horizon shorter than the warmup");
    const InfoStateModel model = realize_tv(fundamental_model(sys, q));
    const LqrPolicy pol = lqr_info_state(model, cost, t0, h);

    Rollout hist;
    hist.inputs = Matrix::Zero(sys.r(), h);
    hist.outputs = Matrix::Zero(sys.m(), h + 1);
    Vector x = x0;
    double total = 0.0;
    for (int t = 0; t < h; ++t) {
        const Vector z = sys.C(t) * x;
        hist.outputs.col(t) = z;
        Vector u;
        if (t < t0) {
            u = warmup.col(t);
        } else {
            u = -pol.gain(t) * info_state_from_rollout(hist, t, q).value;
        }
        hist.inputs.col(t) = u;
        total += cost.stage(z, u);
        x = sys.A(t) * x + sys.B(t) * u;
    }
    total += cost.terminal(sys.C(h) * x);
    return total;
}

CostPair compare_q_lengths(const LtvSystem& sys, const QuadraticCost& cost, const Vector& x0,
                           int q_small, int q_large, const Matrix& warmup) {
    if (q_small > q_large) throw RangeError("compare_q_lengths: q_small exceeds q_large");
    check_warmup(sys, warmup, q_large - 1);
    CostPair out;
    out.small = info_state_closed_loop_cost(sys, cost, x0, q_small, warmup);
    out.large = info_state_closed_loop_cost(sys, cost, x0, q_large, warmup);
    return out;
}

}  // namespace isid
