#pragma once

#include <Eigen/Dense>

#include <span>

namespace isid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative singular-value threshold used wherever a rank decision is made.
inline constexpr double kDefaultRankTol = 1e-8;

// Thin singular value decomposition m = U diag(s) V^T with s nonincreasing.
struct SvdResult {
    Matrix left_vectors;     // rows x k, orthonormal columns
    Vector singular_values;  // k = min(rows, cols)
    Matrix right_vectors;    // cols x k, orthonormal columns
};

// Throws ConvergenceError if the factorization fails and ShapeError on
// non-finite input.
SvdResult svd(const Matrix& m);

// Number of singular values strictly above tol * sv[0]; zero when sv[0] == 0.
int numerical_rank(std::span<const double> sv, double tol = kDefaultRankTol);
int numerical_rank(const Vector& sv, double tol = kDefaultRankTol);

// Rank of m via its singular values.
int matrix_rank(const Matrix& m, double tol = kDefaultRankTol);

// Moore-Penrose pseudoinverse keeping only singular values above tol * s1.
Matrix truncated_pinv(const Matrix& m, double tol = kDefaultRankTol);

// Minimum-norm K minimizing ||rhs - K * lhs||_F, i.e. K = rhs * pinv(lhs).
// lhs is p x N, rhs is q x N.
Matrix lstsq_min_norm(const Matrix& lhs, const Matrix& rhs, double tol = kDefaultRankTol);

// Same solve with the SVD of lhs already available.
Matrix lstsq_min_norm(const SvdResult& lhs_svd, const Matrix& rhs, double tol = kDefaultRankTol);

bool all_finite(const Matrix& m);

// Kronecker product I_k (x) block: block-diagonal with k copies of block.
Matrix block_diag_repeat(const Matrix& block, int k);

}  // namespace isid
