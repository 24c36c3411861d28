#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"
#include "glme/errors.hpp"
#include "glme/operator.hpp"
#include "glme/tridiagonal.hpp"

namespace glme {

/// Iteration scheme of the interior phase.
///  - Basic31: runs the three-term Lanczos recurrence explicitly alongside
///    every CG step (reference scheme, primarily for diagnostics).
///  - Simplified41: derives the Lanczos quantities from the CG coefficients
///    (delta_k = 1/alpha_k + beta_{k-1}/alpha_{k-1}, gamma_{k+1} =
///    sqrt(beta_k)/alpha_k, Q_k = (-1)^k R_k/||R_k||) at no extra operator
///    applications per step.  Default.
enum class Variant { Basic31, Simplified41 };

/// Which phase produced the returned solution.
enum class Branch { Interior, Boundary };

/// How the Lanczos basis needed by the boundary phase is kept.
///  - Retain: store Q_0..Q_k as they are produced (default).
///  - TwoPass: store nothing; after convergence, replay the recurrences once
///    to accumulate the solution (halves memory, doubles operator applies).
enum class BasisPolicy { Retain, TwoPass };

struct SolverConfig {
    double delta = 200.0;  ///< trust radius (Frobenius bound on the solution)
    double eps = 1e-14;    ///< stopping tolerance, applied relative to ||f*(E)||
    /// Iteration cap across both phases; 0 means the default 4*m*n.
    std::size_t max_iter = 0;
    Variant variant = Variant::Simplified41;
    bool trace = true;            ///< record per-iteration TraceRecords
    bool keep_history = false;    ///< retain R/P/f(P)/X/Q sequences (diagnostics)
    bool reorthogonalize = false; ///< re-orthogonalize explicit Lanczos directions
    BasisPolicy basis_policy = BasisPolicy::Retain;
};

/// One per-iteration trace row.  norm_r is ||R_{k+1}|| on the interior branch
/// and the boundary stationarity estimate gamma_{k+1}*|h_k[k]| on the
/// boundary branch; norm_x is the corresponding iterate norm (= ||h_k||_2 on
/// the boundary).  delta_k / gamma_k are the tridiagonal entries produced at
/// step k (gamma_k is the trailing off-diagonal, delta_k the diagonal).
struct TraceRecord {
    std::size_t k = 0;
    Branch branch = Branch::Interior;
    double norm_r = 0.0;
    double norm_x = 0.0;
    double delta_k = 0.0;
    double gamma_k = 0.0;
};

/// Optional retained sequences for property diagnostics.
struct SolveHistory {
    std::vector<DenseMatrix> residuals;   ///< R_0, R_1, ...
    std::vector<DenseMatrix> directions;  ///< P_0, P_1, ...
    std::vector<DenseMatrix> mapped_directions;  ///< f(P_0), f(P_1), ...
    std::vector<DenseMatrix> iterates;    ///< X_1, X_2, ... (accepted interior iterates)
    std::vector<DenseMatrix> lanczos_q;   ///< Q_0, Q_1, ...
};

struct SolveOutcome {
    DenseMatrix x_star;
    Branch branch = Branch::Interior;
    std::size_t iterations = 0;   ///< recurrence advances across both phases
    double lambda_star = 0.0;     ///< multiplier; 0 on the interior branch
    double residual = 0.0;        ///< ||f(X*) - E||
    double kkt_residual = 0.0;    ///< ||f*(f(X*)) - f*(E) + lambda* X*||
    double comp_slack = 0.0;      ///< lambda* * (||X*|| - delta)
    double gamma0 = 0.0;          ///< ||f*(E)||, the scale of the relative tests
    SymTridiagonal tridiag;       ///< accumulated T_k
    std::vector<TraceRecord> trace;
    SolveHistory history;         ///< populated only when cfg.keep_history
};

/// Raised when max_iter is reached before convergence; carries the best
/// iterate and its diagnostics.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& message, SolveOutcome best)
        : Error(message), best_(std::make_shared<SolveOutcome>(std::move(best))) {}
    const SolveOutcome& best() const noexcept { return *best_; }

private:
    std::shared_ptr<SolveOutcome> best_;
};

/// Norm-constrained least squares: minimize 0.5*||f(X) - E||_F^2 subject to
/// ||X||_F <= delta, by CG inside the ball and a Lanczos-driven tridiagonal
/// trust-region subproblem on its boundary.
SolveOutcome solve(const MatrixOperator& op, const DenseMatrix& e,
                   const SolverConfig& cfg = {});
SolveOutcome solve(const EquationSpec& spec, const DenseMatrix& e,
                   const SolverConfig& cfg = {});

/// State of the explicit three-term Lanczos recurrence on f*f, seeded with
/// t_0 = R_0.  q_curr is the latest orthonormal direction Q_k; t_next and
/// gamma_next hold the still-unnormalized successor.
struct LanczosState {
    DenseMatrix q_prev;
    DenseMatrix q_curr;
    DenseMatrix t_next;
    double gamma_next = 0.0;
    SymTridiagonal tridiag;
    std::vector<DenseMatrix> basis;  ///< retained Q_0..Q_k (empty when disabled)
};

/// Seeds the recurrence with t0 (= R_0): normalizes Q_0 = t0/||t0||, appends
/// delta_0, and computes t_1, gamma_1.
LanczosState lanczos_start(const MatrixOperator& op, const DenseMatrix& t0,
                           bool retain_basis = true);

/// Advances one step: normalizes Q_{k+1} = t_next/gamma_next, appends
/// (gamma_{k+1}, delta_{k+1}), computes t_{k+2}, gamma_{k+2}.  Throws
/// NumericalError when gamma_next has fallen to roundoff level relative to
/// the accumulated matrix (the recurrence's termination signal).
void lanczos_step(const MatrixOperator& op, LanczosState& state);

/// Sum_i h[i] * basis[i]; the basis is expected orthonormal so the result
/// has Frobenius norm ||h||_2.
DenseMatrix assemble_boundary_solution(const std::vector<DenseMatrix>& basis,
                                       const std::vector<double>& h);

}  // namespace glme
