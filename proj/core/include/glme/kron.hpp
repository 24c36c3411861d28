#pragma once

#include <cstddef>
#include <vector>

#include "glme/dense_matrix.hpp"

namespace glme {

/// Column-major vectorization: vec(X) stacks the columns of X.
std::vector<double> vec(const DenseMatrix& x);

/// Inverse of vec: reshape a length rows*cols vector (column-major) into a
/// rows x cols matrix.
DenseMatrix unvec(const std::vector<double>& v, std::size_t rows, std::size_t cols);

/// Kronecker product a (x) b.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Commutation permutation P with P * vec(X) = vec(X^T) for X of shape
/// rows x cols.
class CommutationPerm {
public:
    CommutationPerm(std::size_t rows, std::size_t cols);

    std::size_t dim() const noexcept { return rows_ * cols_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    /// Apply P to a length rows*cols vector.
    std::vector<double> apply(const std::vector<double>& v) const;

    /// Apply P^T (= P^{-1}, the commutation permutation of the transposed
    /// shape) to a length rows*cols vector.
    std::vector<double> apply_transposed(const std::vector<double>& v) const;

    /// Dense materialization of P.
    DenseMatrix to_dense() const;

private:
    std::size_t rows_;
    std::size_t cols_;
};

}  // namespace glme
