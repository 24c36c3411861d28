#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/structured_factor.hpp"

namespace glme {

/// Named equation shapes with dedicated builders.  Custom covers anything
/// assembled directly from term lists.
enum class Family {
    Custom,
    AXB,                  ///< A X B = E
    ClassicalSylvester,   ///< A X + X D = E
    GeneralizedSylvester, ///< A X B + C X D = E
    Stein,                ///< A X B + X = E
    TClassical,           ///< A X + X^T D = E
    TGeneralized,         ///< A X B + C X^T D = E
    TStein,               ///< A X B + X^T = E
    LyapunovDiscrete,     ///< A X A^T - X = E
    LyapunovContinuous,   ///< A X + X A^T = E
    StructuredSylvester,  ///< A X + X D = E with a structured right coefficient
};

/// Canonical lowercase name of a family (e.g. "classical_sylvester").
std::string family_name(Family family);
/// Inverse of family_name; throws ValueError for unknown names.
Family family_from_name(const std::string& name);

/// One pair of coefficient factors.  In a linear term it contributes
/// left * X * right; in a transposed term, left * X^T * right.
struct TermPair {
    StructuredFactor left;
    StructuredFactor right;
};

/// A generalized linear matrix equation
///   f(X) = sum_k A_k X B_k + sum_j C_j X^T D_j = E
/// over unknowns X of shape m x n, with f(X) of shape p x q.  Exposes the
/// forward map f and its adjoint f* under the trace inner product.
class EquationSpec {
public:
    /// Builds from explicit term lists.  Shapes are derived from the first
    /// term and every factor is validated against them:
    /// linear left p x m, linear right n x q, transposed left p x n,
    /// transposed right m x q.
    EquationSpec(std::size_t m, std::size_t n, std::vector<TermPair> linear,
                 std::vector<TermPair> transposed, Family family = Family::Custom);

    static EquationSpec axb(StructuredFactor a, StructuredFactor b);
    static EquationSpec classical_sylvester(StructuredFactor a, StructuredFactor d);
    static EquationSpec generalized_sylvester(StructuredFactor a, StructuredFactor b,
                                              StructuredFactor c, StructuredFactor d);
    static EquationSpec stein(StructuredFactor a, StructuredFactor b);
    static EquationSpec t_classical(StructuredFactor a, StructuredFactor d);
    static EquationSpec t_generalized(StructuredFactor a, StructuredFactor b,
                                      StructuredFactor c, StructuredFactor d);
    static EquationSpec t_stein(StructuredFactor a, StructuredFactor b);
    static EquationSpec lyapunov_discrete(StructuredFactor a);
    static EquationSpec lyapunov_continuous(StructuredFactor a);
    static EquationSpec structured_sylvester(StructuredFactor a, StructuredFactor d);

    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return p_; }
    std::size_t q() const noexcept { return q_; }
    Family family() const noexcept { return family_; }

    const std::vector<TermPair>& linear_terms() const noexcept { return linear_; }
    const std::vector<TermPair>& transposed_terms() const noexcept { return transposed_; }
    bool has_transposed_terms() const noexcept { return !transposed_.empty(); }

    /// f(X) for X of shape m x n.
    DenseMatrix apply_f(const DenseMatrix& x) const;
    /// Adjoint f*(Y) for Y of shape p x q: sum_k A_k^T Y B_k^T + sum_j D_j Y^T C_j.
    DenseMatrix apply_fstar(const DenseMatrix& y) const;

private:
    std::size_t m_;
    std::size_t n_;
    std::size_t p_;
    std::size_t q_;
    std::vector<TermPair> linear_;
    std::vector<TermPair> transposed_;
    Family family_;
};

}  // namespace glme
