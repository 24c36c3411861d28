#pragma once

#include <cstddef>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"

namespace glme {

/// Default cap on m*n*p*q for dense materialization.
inline constexpr std::size_t kOracleDefaultCap = std::size_t{4096} * std::size_t{4096};

/// Dense vectorized form of a norm-constrained equation problem:
/// minimize 0.5*||m_mat * x - e_vec||^2 over ||x|| <= delta, with
/// x = vec(X) in column-major order.
struct VectorizedProblem {
    DenseMatrix m_mat;          ///< pq x mn operator matrix
    std::vector<double> e_vec;  ///< vec(E), length pq
    double delta = 0.0;
    std::size_t m = 0;  ///< domain rows, to reshape solutions
    std::size_t n = 0;  ///< domain cols
};

/// Materializes the operator matrix entrywise from the densified coefficient
/// factors: sum of B^T (x) A for the plain terms plus, for each
/// transpose-coupled term, (D^T (x) C) composed with the vec(X) -> vec(X^T)
/// permutation.  Deliberately shares no code with EquationSpec::apply_f so
/// the two routes check each other.
///
/// Throws SizeLimitError when m*n*p*q exceeds `cap`.
VectorizedProblem oracle_assemble(const EquationSpec& spec, const DenseMatrix& e,
                                  double delta, std::size_t cap = kOracleDefaultCap);

struct OracleSolution {
    DenseMatrix x;           ///< m x n minimizer (min-norm one if non-unique)
    double lambda = 0.0;     ///< multiplier, >= 0; 0 on the interior
    double objective = 0.0;  ///< 0.5 * ||M vec(x) - e_vec||^2
    double residual = 0.0;   ///< ||M vec(x) - e_vec||
    double sigma_max = 0.0;  ///< largest singular value of m_mat
};

/// Reference solve by full singular value decomposition: returns the
/// min-norm unconstrained least-squares solution when it fits in the ball,
/// otherwise finds the multiplier of the boundary solution by bisection of
/// the secular equation, carried to floating-point exhaustion.
OracleSolution oracle_solve(const VectorizedProblem& vp);

}  // namespace glme
