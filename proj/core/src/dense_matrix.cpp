#include "glme/dense_matrix.hpp"

#include <cmath>
#include <string>

#include "glme/errors.hpp"
#include "glme/op_count.hpp"

namespace glme {

namespace {

void require_nonempty_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("DenseMatrix: dimensions must be >= 1, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string("DenseMatrix ") + op + ": shape mismatch " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    require_nonempty_dims(rows, cols);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_nonempty_dims(rows, cols);
    if (data_.size() != rows * cols) {
        throw DimensionError("DenseMatrix: data size " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    if (!all_finite()) {
        throw ValueError("DenseMatrix: non-finite entry in input data");
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    require_nonempty_dims(rows_, cols_);
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw DimensionError("DenseMatrix: ragged initializer rows");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
    if (!all_finite()) {
        throw ValueError("DenseMatrix: non-finite entry in input data");
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double DenseMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
        throw DimensionError("DenseMatrix::at: index (" + std::to_string(i) + "," +
                             std::to_string(j) + ") out of range for " +
                             std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    return data_[i * cols_ + j];
}

double& DenseMatrix::at(std::size_t i, std::size_t j) {
    if (i >= rows_ || j >= cols_) {
        throw DimensionError("DenseMatrix::at: index (" + std::to_string(i) + "," +
                             std::to_string(j) + ") out of range for " +
                             std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    return data_[i * cols_ + j];
}

bool DenseMatrix::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("DenseMatrix product: inner dimensions " +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    DenseMatrix c(m, n);
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* cd = c.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double aval = ad[i * k + l];
            if (aval == 0.0) continue;
            const double* brow = bd + l * n;
            double* crow = cd + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
    opcount::add(static_cast<std::uint64_t>(m) * k * n);
    return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "+");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "-");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

DenseMatrix operator*(double alpha, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (double& v : c.data()) v *= alpha;
    opcount::add(a.size());
    return c;
}

DenseMatrix operator-(const DenseMatrix& a) { return -1.0 * a; }

void add_scaled(DenseMatrix& a, double alpha, const DenseMatrix& b) {
    require_same_shape(a, b, "add_scaled");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += alpha * b.data()[i];
    opcount::add(a.size());
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

double frob_inner(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "frob_inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    opcount::add(a.size());
    return s;
}

double frob_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    opcount::add(a.size());
    return std::sqrt(s);
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a.data()[i] - b.data()[i]);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace glme
