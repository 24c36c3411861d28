#pragma once

#include <cstddef>
#include <utility>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"

namespace glme {

/// Abstract linear map f from m x n matrices to p x q matrices together with
/// its adjoint f* under the trace inner product <A, B> = tr(B^T A).
/// Implementations must be pure and safe to call concurrently.
class MatrixOperator {
public:
    virtual ~MatrixOperator() = default;

    virtual std::size_t domain_rows() const noexcept = 0;    ///< m
    virtual std::size_t domain_cols() const noexcept = 0;    ///< n
    virtual std::size_t codomain_rows() const noexcept = 0;  ///< p
    virtual std::size_t codomain_cols() const noexcept = 0;  ///< q

    /// f(X) for X of shape m x n.
    virtual DenseMatrix apply(const DenseMatrix& x) const = 0;
    /// f*(Y) for Y of shape p x q, satisfying <f(X), Y> = <X, f*(Y)>.
    virtual DenseMatrix apply_adjoint(const DenseMatrix& y) const = 0;
};

/// MatrixOperator view of an EquationSpec's forward map and adjoint.
class EquationOperator final : public MatrixOperator {
public:
    explicit EquationOperator(EquationSpec spec) : spec_(std::move(spec)) {}

    const EquationSpec& spec() const noexcept { return spec_; }

    std::size_t domain_rows() const noexcept override { return spec_.m(); }
    std::size_t domain_cols() const noexcept override { return spec_.n(); }
    std::size_t codomain_rows() const noexcept override { return spec_.p(); }
    std::size_t codomain_cols() const noexcept override { return spec_.q(); }

    DenseMatrix apply(const DenseMatrix& x) const override { return spec_.apply_f(x); }
    DenseMatrix apply_adjoint(const DenseMatrix& y) const override {
        return spec_.apply_fstar(y);
    }

private:
    EquationSpec spec_;
};

}  // namespace glme
