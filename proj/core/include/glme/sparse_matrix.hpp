#pragma once

#include <cstddef>
#include <vector>

#include "glme/dense_matrix.hpp"

namespace glme {

/// One coordinate-format entry.
struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Sparse real matrix in canonical coordinate format: entries sorted by
/// (row, col), duplicate coordinates summed, exact zeros dropped, all values
/// finite.  Immutable after construction.
class SparseMatrix {
public:
    /// Empty 0x0 placeholder.
    SparseMatrix() = default;

    /// Build from arbitrary triplets; canonicalizes (sort, sum duplicates,
    /// drop zeros).  Rejects out-of-range coordinates and non-finite values.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

    /// Sparsify a dense matrix, dropping entries with |a_ij| <= drop_tol.
    static SparseMatrix from_dense(const DenseMatrix& a, double drop_tol = 0.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    double density() const noexcept {
        return rows_ && cols_
                   ? static_cast<double>(entries_.size()) / (static_cast<double>(rows_) * cols_)
                   : 0.0;
    }

    const std::vector<Triplet>& triplets() const noexcept { return entries_; }

    DenseMatrix to_dense() const;
    SparseMatrix transposed() const;

    /// this * x.  Cost counted as nnz * cols(x) multiply-adds.
    DenseMatrix mul_left(const DenseMatrix& x) const;
    /// this^T * x.
    DenseMatrix mul_left_transposed(const DenseMatrix& x) const;
    /// x * this.  Cost counted as nnz * rows(x) multiply-adds.
    DenseMatrix mul_right(const DenseMatrix& x) const;
    /// x * this^T.
    DenseMatrix mul_right_transposed(const DenseMatrix& x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Triplet> entries_;
};

}  // namespace glme
