#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "glme/errors.hpp"

namespace glme {

/// Growable symmetric tridiagonal matrix, stored as its diagonal and
/// first off-diagonal.  Rows are appended one at a time as a three-term
/// recurrence produces them.
class SymTridiagonal {
public:
    SymTridiagonal() = default;

    std::size_t dim() const noexcept { return diag_.size(); }
    bool empty() const noexcept { return diag_.empty(); }

    double diag(std::size_t i) const {
        check_index(i, diag_.size(), "diagonal");
        return diag_[i];
    }
    /// Entry (i, i+1) == (i+1, i); valid for i < dim()-1.
    double off(std::size_t i) const {
        check_index(i, off_.size(), "off-diagonal");
        return off_[i];
    }

    /// Appends the first diagonal entry; only valid on an empty matrix.
    void append(double delta) {
        if (!diag_.empty()) {
            throw ValueError("append(delta) is only valid on an empty tridiagonal matrix");
        }
        check_finite(delta);
        diag_.push_back(delta);
    }

    /// Appends row k: the off-diagonal entry (k-1, k) and diagonal entry (k, k).
    void append(double gamma, double delta) {
        if (diag_.empty()) {
            throw ValueError("append(gamma, delta) requires a previous diagonal entry");
        }
        check_finite(gamma);
        check_finite(delta);
        off_.push_back(gamma);
        diag_.push_back(delta);
    }

    /// y = T x.
    std::vector<double> mul(const std::vector<double>& x) const {
        if (x.size() != diag_.size()) {
            throw DimensionError("tridiagonal product expects a vector of length " +
                                 std::to_string(diag_.size()));
        }
        std::vector<double> y(x.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double v = diag_[i] * x[i];
            if (i > 0) v += off_[i - 1] * x[i - 1];
            if (i + 1 < x.size()) v += off_[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }

    /// Largest absolute entry; 0 for an empty matrix.
    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : diag_) m = std::max(m, std::abs(v));
        for (double v : off_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Gershgorin lower bound on the smallest eigenvalue.
    double gershgorin_min() const {
        if (diag_.empty()) throw ValueError("Gershgorin bound of an empty matrix");
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < diag_.size(); ++i) {
            double radius = 0.0;
            if (i > 0) radius += std::abs(off_[i - 1]);
            if (i + 1 < diag_.size()) radius += std::abs(off_[i]);
            lo = std::min(lo, diag_[i] - radius);
        }
        return lo;
    }

    const std::vector<double>& diagonal() const noexcept { return diag_; }
    const std::vector<double>& off_diagonal() const noexcept { return off_; }

private:
    static void check_finite(double v) {
        if (!std::isfinite(v)) throw ValueError("tridiagonal entries must be finite");
    }
    static void check_index(std::size_t i, std::size_t n, const char* what) {
        if (i >= n) {
            throw DimensionError(std::string(what) + " index " + std::to_string(i) +
                                 " out of range for size " + std::to_string(n));
        }
    }

    std::vector<double> diag_;
    std::vector<double> off_;
};

}  // namespace glme
