#include "glme/kron.hpp"

#include <string>

#include "glme/errors.hpp"
#include "glme/op_count.hpp"

namespace glme {

std::vector<double> vec(const DenseMatrix& x) {
    std::vector<double> v(x.size());
    std::size_t idx = 0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        for (std::size_t i = 0; i < x.rows(); ++i) v[idx++] = x(i, j);
    }
    return v;
}

DenseMatrix unvec(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) {
        throw DimensionError("unvec: vector length " + std::to_string(v.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    DenseMatrix x(rows, cols);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) x(i, j) = v[idx++];
    }
    return x;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia) {
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const double av = a(ia, ja);
            if (av == 0.0) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib) {
                for (std::size_t jb = 0; jb < b.cols(); ++jb) {
                    k(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
                }
            }
        }
    }
    opcount::add(static_cast<std::uint64_t>(a.size()) * b.size());
    return k;
}

CommutationPerm::CommutationPerm(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("CommutationPerm: dimensions must be >= 1");
    }
}

std::vector<double> CommutationPerm::apply(const std::vector<double>& v) const {
    if (v.size() != dim()) {
        throw DimensionError("CommutationPerm::apply: vector length " +
                             std::to_string(v.size()) + " != " + std::to_string(dim()));
    }
    // vec(X) position i + j*rows maps to vec(X^T) position j + i*cols.
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i = 0; i < rows_; ++i) out[j + i * cols_] = v[i + j * rows_];
    }
    return out;
}

std::vector<double> CommutationPerm::apply_transposed(const std::vector<double>& v) const {
    if (v.size() != dim()) {
        throw DimensionError("CommutationPerm::apply_transposed: vector length " +
                             std::to_string(v.size()) + " != " + std::to_string(dim()));
    }
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i = 0; i < rows_; ++i) out[i + j * rows_] = v[j + i * cols_];
    }
    return out;
}

DenseMatrix CommutationPerm::to_dense() const {
    DenseMatrix p(dim(), dim());
    for (std::size_t j = 0; j < cols_; ++j) {
        for (std::size_t i = 0; i < rows_; ++i) p(j + i * cols_, i + j * rows_) = 1.0;
    }
    return p;
}

}  // namespace glme
