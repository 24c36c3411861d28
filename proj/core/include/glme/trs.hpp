#pragma once

#include <cstddef>
#include <vector>

#include "glme/tridiagonal.hpp"

namespace glme {

/// Bidiagonal Cholesky factor L of a shifted symmetric tridiagonal matrix:
/// T + shift*I = L L^T with L lower bidiagonal.
struct BidiagCholesky {
    std::vector<double> diag;     ///< L(i, i)
    std::vector<double> subdiag;  ///< L(i+1, i)
};

/// Attempts T + shift*I = L L^T.  Returns false (leaving `out` unspecified)
/// when a pivot falls below the positive-definiteness tolerance.
bool try_cholesky_shifted(const SymTridiagonal& t, double shift, BidiagCholesky& out);

/// In-place forward substitution L y = rhs.
void solve_lower(const BidiagCholesky& l, std::vector<double>& rhs);
/// In-place back substitution L^T x = rhs.
void solve_upper(const BidiagCholesky& l, std::vector<double>& rhs);

struct TrsOptions {
    /// Relative tolerance on the multiplier update and the boundary residual.
    double eps = 1e-13;
    /// Cap on secular iterations before ConvergenceError.
    std::size_t max_iter = 100;
    /// Starting multiplier guess (e.g. the previous subproblem's multiplier).
    double lambda_warm_start = 0.0;
};

struct TrsResult {
    std::vector<double> h;               ///< minimizer
    double lambda = 0.0;                 ///< multiplier, >= 0
    double objective = 0.0;              ///< 0.5 h^T T h + gamma0 * h[0]
    bool boundary = false;               ///< true when ||h|| == delta was active
    bool hard_case = false;              ///< minimizer needed an eigenvector component
    std::size_t newton_iters = 0;        ///< secular iterations performed
    std::vector<double> lambda_history;  ///< multiplier after each iteration
};

/// Solves min 0.5 h^T T h + gamma0 * h[0]  subject to  ||h||_2 <= delta
/// by a safeguarded Newton iteration on the reciprocal boundary equation,
/// with bidiagonal Cholesky factorizations of T + lambda I.
TrsResult trs_solve(const SymTridiagonal& t, double gamma0, double delta,
                    const TrsOptions& options = {});

}  // namespace glme
