#include "isid/numerics.hpp"

#include "isid/errors.hpp"

#include <string>

namespace isid {

bool all_finite(const Matrix& m) { return m.allFinite(); }

SvdResult svd(const Matrix& m) {
    if (!m.allFinite()) throw ShapeError("svd: input contains non-finite entries");
    const Eigen::Index k = std::min(m.rows(), m.cols());
    if (k == 0) {
        return {Matrix(m.rows(), 0), Vector(0), Matrix(m.cols(), 0)};
    }
    // One-sided Jacobi is accurate for the small dense matrices used here.
    Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw ConvergenceError("svd: Jacobi iteration did not converge for a " +
                               std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                               " matrix");
    }
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

int numerical_rank(std::span<const double> sv, double tol) {
    if (sv.empty() || !(sv[0] > 0.0)) return 0;
    const double cut = tol * sv[0];
    int rank = 0;
    for (double s : sv) {
        if (s > cut) ++rank;
    }
    return rank;
}

int numerical_rank(const Vector& sv, double tol) {
    return numerical_rank(std::span<const double>(sv.data(), static_cast<size_t>(sv.size())), tol);
}

int matrix_rank(const Matrix& m, double tol) { return numerical_rank(svd(m).singular_values, tol); }

Matrix truncated_pinv(const Matrix& m, double tol) {
    const SvdResult d = svd(m);
    const int rank = numerical_rank(d.singular_values, tol);
    Matrix out = Matrix::Zero(m.cols(), m.rows());
    for (int i = 0; i < rank; ++i) {
        out.noalias() += (d.right_vectors.col(i) / d.singular_values(i)) *
                         d.left_vectors.col(i).transpose();
    }
    return out;
}

Matrix lstsq_min_norm(const SvdResult& lhs_svd, const Matrix& rhs, double tol) {
    const Matrix& u = lhs_svd.left_vectors;
    const Matrix& v = lhs_svd.right_vectors;
    if (rhs.cols() != v.rows()) {
        throw ShapeError("lstsq_min_norm: rhs has " + std::to_string(rhs.cols()) +
                         " columns but lhs has " + std::to_string(v.rows()));
    }
    const int rank = numerical_rank(lhs_svd.singular_values, tol);
    Matrix k = Matrix::Zero(rhs.rows(), u.rows());
    for (int i = 0; i < rank; ++i) {
        k.noalias() += ((rhs * v.col(i)) / lhs_svd.singular_values(i)) * u.col(i).transpose();
    }
    return k;
}

Matrix lstsq_min_norm(const Matrix& lhs, const Matrix& rhs, double tol) {
    if (lhs.cols() != rhs.cols()) {
        throw ShapeError("lstsq_min_norm: lhs is " + std::to_string(lhs.rows()) + "x" +
                         std::to_string(lhs.cols()) + ", rhs is " + std::to_string(rhs.rows()) +
                         "x" + std::to_string(rhs.cols()));
    }
    if (!rhs.allFinite()) throw ShapeError("lstsq_min_norm: rhs contains non-finite entries");
    return lstsq_min_norm(svd(lhs), rhs, tol);
}

Matrix block_diag_repeat(const Matrix& block, int k) {
    Matrix out = Matrix::Zero(block.rows() * k, block.cols() * k);
    for (int i = 0; i < k; ++i) {
        out.block(i * block.rows(), i * block.cols(), block.rows(), block.cols()) = block;
    }
    return out;
}

}  // namespace isid
