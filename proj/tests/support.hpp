#pragma once

#include "isid/numerics.hpp"
#include "isid/plants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace testing {

using isid::Matrix;
using isid::Vector;

// Hand-rolled generators for property tests.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }

    Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
        Matrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
        }
        return m;
    }
    Vector vector(Eigen::Index n) { return matrix(n, 1).col(0); }

    // rows x cols with exactly `rank` nonzero singular values spread over `spread` decades.
    Matrix low_rank(Eigen::Index rows, Eigen::Index cols, int rank, double spread = 3.0) {
        Matrix m = Matrix::Zero(rows, cols);
        for (int k = 0; k < rank; ++k) {
            const double s = std::pow(10.0, -spread * k / std::max(rank - 1, 1));
            m += s * vector(rows) * vector(cols).transpose();
        }
        return m;
    }
};

inline double rel_diff(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Largest per-column error over the largest column norm of the reference.
inline double peak_relative(const Matrix& ref, const Matrix& other) {
    double peak = 0.0, err = 0.0;
    for (Eigen::Index k = 0; k < ref.cols(); ++k) {
        peak = std::max(peak, ref.col(k).norm());
        err = std::max(err, (ref.col(k) - other.col(k)).norm());
    }
    return peak > 0.0 ? err / peak : err;
}

}  // namespace testing
