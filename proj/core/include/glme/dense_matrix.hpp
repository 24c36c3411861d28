#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace glme {

/// Dense real matrix with flat row-major storage.
///
/// A plain value type: all algebra is exposed as pure functions returning new
/// values, and the constructors reject non-finite input.  Mutable element
/// access exists for building matrices; code that shares matrices across
/// solves treats them as immutable.
class DenseMatrix {
public:
    /// Empty 0x0 placeholder (only assignable; every operation rejects it).
    DenseMatrix() = default;

    /// rows x cols zero matrix.  Dimensions must be >= 1.
    DenseMatrix(std::size_t rows, std::size_t cols);

    /// rows x cols matrix from row-major data.  Rejects non-finite entries.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Build from nested braces: DenseMatrix{{1,2},{3,4}}.  Rejects ragged or
    /// empty input and non-finite entries.
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    /// n x n identity.
    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    /// Unchecked element access.
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j) noexcept {
        return data_[i * cols_ + j];
    }

    /// Bounds-checked element access; throws DimensionError when out of range.
    double at(std::size_t i, std::size_t j) const;
    double& at(std::size_t i, std::size_t j);

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    /// True when every entry is finite.
    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Matrix product a*b.  Cost is counted as rows(a)*cols(a)*cols(b)
/// multiply-adds.
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double alpha, const DenseMatrix& a);
DenseMatrix operator-(const DenseMatrix& a);

/// In-place accumulation a += alpha*b (the iteration kernels' only update).
void add_scaled(DenseMatrix& a, double alpha, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

/// Frobenius inner product trace(b^T a) = sum_ij a_ij b_ij.
double frob_inner(const DenseMatrix& a, const DenseMatrix& b);

/// Frobenius norm.
double frob_norm(const DenseMatrix& a);

/// Max-abs difference between two same-shape matrices.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace glme
