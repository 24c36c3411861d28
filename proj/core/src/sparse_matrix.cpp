#include "glme/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glme/errors.hpp"
#include "glme/op_count.hpp"

namespace glme {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("SparseMatrix: dimensions must be >= 1, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (const Triplet& t : entries_) {
        if (t.row >= rows_ || t.col >= cols_) {
            throw DimensionError("SparseMatrix: entry (" + std::to_string(t.row) + "," +
                                 std::to_string(t.col) + ") out of range for " +
                                 std::to_string(rows_) + "x" + std::to_string(cols_));
        }
        if (!std::isfinite(t.value)) {
            throw ValueError("SparseMatrix: non-finite entry value");
        }
    }
    std::sort(entries_.begin(), entries_.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    // Sum duplicates in place, then drop exact zeros.
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries_.size();) {
        Triplet acc = entries_[i];
        std::size_t j = i + 1;
        while (j < entries_.size() && entries_[j].row == acc.row && entries_[j].col == acc.col) {
            acc.value += entries_[j].value;
            ++j;
        }
        if (acc.value != 0.0) entries_[out++] = acc;
        i = j;
    }
    entries_.resize(out);
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop_tol) {
    std::vector<Triplet> ts;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (std::fabs(a(i, j)) > drop_tol) ts.push_back({i, j, a(i, j)});
        }
    }
    return SparseMatrix(a.rows(), a.cols(), std::move(ts));
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (const Triplet& t : entries_) d(t.row, t.col) = t.value;
    return d;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<Triplet> ts;
    ts.reserve(entries_.size());
    for (const Triplet& t : entries_) ts.push_back({t.col, t.row, t.value});
    return SparseMatrix(cols_, rows_, std::move(ts));
}

DenseMatrix SparseMatrix::mul_left(const DenseMatrix& x) const {
    if (cols_ != x.rows()) {
        throw DimensionError("SparseMatrix::mul_left: inner dimensions " +
                             std::to_string(cols_) + " vs " + std::to_string(x.rows()));
    }
    DenseMatrix out(rows_, x.cols());
    const std::size_t q = x.cols();
    for (const Triplet& t : entries_) {
        const double* xr = x.data().data() + t.col * q;
        double* orow = out.data().data() + t.row * q;
        for (std::size_t j = 0; j < q; ++j) orow[j] += t.value * xr[j];
    }
    opcount::add(static_cast<std::uint64_t>(entries_.size()) * q);
    return out;
}

DenseMatrix SparseMatrix::mul_left_transposed(const DenseMatrix& x) const {
    if (rows_ != x.rows()) {
        throw DimensionError("SparseMatrix::mul_left_transposed: inner dimensions " +
                             std::to_string(rows_) + " vs " + std::to_string(x.rows()));
    }
    DenseMatrix out(cols_, x.cols());
    const std::size_t q = x.cols();
    for (const Triplet& t : entries_) {
        const double* xr = x.data().data() + t.row * q;
        double* orow = out.data().data() + t.col * q;
        for (std::size_t j = 0; j < q; ++j) orow[j] += t.value * xr[j];
    }
    opcount::add(static_cast<std::uint64_t>(entries_.size()) * q);
    return out;
}

DenseMatrix SparseMatrix::mul_right(const DenseMatrix& x) const {
    if (x.cols() != rows_) {
        throw DimensionError("SparseMatrix::mul_right: inner dimensions " +
                             std::to_string(x.cols()) + " vs " + std::to_string(rows_));
    }
    DenseMatrix out(x.rows(), cols_);
    const std::size_t p = x.rows();
    const std::size_t xc = x.cols();
    const std::size_t oc = cols_;
    for (const Triplet& t : entries_) {
        const double* xd = x.data().data();
        double* od = out.data().data();
        for (std::size_t i = 0; i < p; ++i) od[i * oc + t.col] += xd[i * xc + t.row] * t.value;
    }
    opcount::add(static_cast<std::uint64_t>(entries_.size()) * p);
    return out;
}

DenseMatrix SparseMatrix::mul_right_transposed(const DenseMatrix& x) const {
    if (x.cols() != cols_) {
        throw DimensionError("SparseMatrix::mul_right_transposed: inner dimensions " +
                             std::to_string(x.cols()) + " vs " + std::to_string(cols_));
    }
    DenseMatrix out(x.rows(), rows_);
    const std::size_t p = x.rows();
    const std::size_t xc = x.cols();
    const std::size_t oc = rows_;
    for (const Triplet& t : entries_) {
        const double* xd = x.data().data();
        double* od = out.data().data();
        for (std::size_t i = 0; i < p; ++i) od[i * oc + t.row] += xd[i * xc + t.col] * t.value;
    }
    opcount::add(static_cast<std::uint64_t>(entries_.size()) * p);
    return out;
}

}  // namespace glme
