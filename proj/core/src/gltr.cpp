#include "glme/gltr.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "glme/trs.hpp"

namespace glme {

namespace {

/// Second-pass accumulation plan for BasisPolicy::TwoPass: the recurrences
/// are re-run deterministically and each produced Q_j contributes
/// coeff[j] * Q_j to *accum instead of being stored.
struct ReplayPlan {
    const std::vector<double>* coeff = nullptr;
    DenseMatrix* accum = nullptr;
    std::size_t produced = 0;
};

void validate_config(const SolverConfig& cfg) {
    if (!std::isfinite(cfg.delta) || cfg.delta <= 0.0) {
        throw ValueError("trust radius must be positive and finite");
    }
    if (!std::isfinite(cfg.eps) || cfg.eps <= 0.0) {
        throw ValueError("stopping tolerance must be positive and finite");
    }
    if (cfg.reorthogonalize && cfg.basis_policy == BasisPolicy::TwoPass) {
        throw ValueError("re-orthogonalization requires the retained-basis policy");
    }
}

/// Driver for one full solve.  The same machinery runs the normal pass and,
/// for BasisPolicy::TwoPass, the basis-free replay pass.
class Runner {
public:
    Runner(const MatrixOperator& op, const DenseMatrix& e, const SolverConfig& cfg,
           ReplayPlan* replay)
        : op_(op), e_(e), cfg_(cfg), replay_(replay), m_(op.domain_rows()),
          n_(op.domain_cols()) {
        if (e.rows() != op.codomain_rows() || e.cols() != op.codomain_cols()) {
            throw DimensionError("right-hand side must be " +
                                 std::to_string(op.codomain_rows()) + "x" +
                                 std::to_string(op.codomain_cols()) + ", got " +
                                 std::to_string(e.rows()) + "x" + std::to_string(e.cols()));
        }
        max_iter_ = cfg.max_iter > 0 ? cfg.max_iter : 4 * m_ * n_;
    }

    SolveOutcome run() {
        fstar_e_ = op_.apply_adjoint(e_);
        gamma0_ = frob_norm(fstar_e_);
        out_.gamma0 = gamma0_;

        // A vanished gradient at the origin means X* = 0 already minimizes.
        if (gamma0_ <= cfg_.eps) {
            out_.x_star = DenseMatrix(m_, n_);
            out_.branch = Branch::Interior;
            finish_diagnostics(0.0);
            return std::move(out_);
        }
        tol_ = cfg_.eps * gamma0_;

        x_ = DenseMatrix(m_, n_);
        r_ = -1.0 * fstar_e_;
        p_ = fstar_e_;
        norm_r_ = gamma0_;
        record_history_start();

        const bool interior_converged = cfg_.variant == Variant::Basic31
                                            ? interior_basic()
                                            : interior_simplified();
        if (interior_converged) {
            out_.x_star = std::move(x_);
            out_.branch = Branch::Interior;
            finish_diagnostics(0.0);
            return std::move(out_);
        }
        return boundary();
    }

private:
    // ---- shared helpers -------------------------------------------------

    bool replaying() const noexcept { return replay_ != nullptr; }

    void emit_q(const DenseMatrix& q) {
        if (replaying()) {
            if (replay_->produced < replay_->coeff->size()) {
                add_scaled(*replay_->accum, (*replay_->coeff)[replay_->produced], q);
            }
            ++replay_->produced;
            return;
        }
        if (cfg_.basis_policy == BasisPolicy::Retain) basis_.push_back(q);
        if (cfg_.keep_history) out_.history.lanczos_q.push_back(q);
    }

    void check_finite(double value, const char* what) const {
        if (!std::isfinite(value)) {
            throw NumericalError(std::string("non-finite ") + what + " at iteration " +
                                 std::to_string(iterations_));
        }
    }

    void record_history_start() {
        if (!cfg_.keep_history || replaying()) return;
        out_.history.residuals.push_back(r_);
        out_.history.directions.push_back(p_);
    }

    void record_interior_trace(std::size_t k, double nr, double nx, double delta_k,
                               double gamma_k) {
        if (!cfg_.trace || replaying()) return;
        out_.trace.push_back({k, Branch::Interior, nr, nx, delta_k, gamma_k});
    }

    void throw_iteration_limit(SolveOutcome best) {
        throw IterationLimitError("no convergence within " + std::to_string(max_iter_) +
                                      " iterations",
                                  std::move(best));
    }

    /// Removes components of t along the retained basis (diagnostic option).
    void reorthogonalize(DenseMatrix& t) const {
        for (const DenseMatrix& q : basis_) {
            const double c = frob_inner(t, q);
            add_scaled(t, -c, q);
        }
    }

    // ---- interior phase, explicit-recurrence variant --------------------
    //
    // Invariant entering the CG update of step k: tridiag_ holds
    // delta_0..delta_k, q_curr_ = Q_k, and (t_next_, gamma_next_) hold the
    // unnormalized successor.  A switch can therefore enter the boundary
    // phase directly.

    bool interior_basic() {
        t_next_ = r_;
        gamma_next_ = gamma0_;
        bool chain_alive = true;
        for (std::size_t k = 0;; ++k) {
            if (chain_alive) {
                if (gamma_next_ <= tol_) {
                    chain_alive = false;  // invariant subspace reached
                } else {
                    advance_chain();
                }
            }

            const DenseMatrix fp = op_.apply(p_);
            const double norm_fp = frob_norm(fp);
            check_finite(norm_fp, "mapped direction norm");
            if (cfg_.keep_history && !replaying()) out_.history.mapped_directions.push_back(fp);
            if (norm_fp <= tol_) return false;  // f(P_k) vanished: switch

            const double alpha = (norm_r_ * norm_r_) / (norm_fp * norm_fp);
            check_finite(alpha, "step length");
            DenseMatrix x_next = x_;
            add_scaled(x_next, alpha, p_);
            const double norm_x_next = frob_norm(x_next);
            ++iterations_;

            if (norm_x_next > cfg_.delta) return false;  // leaves the ball: switch

            x_ = std::move(x_next);
            add_scaled(r_, alpha, op_.apply_adjoint(fp));
            const double nr = frob_norm(r_);
            check_finite(nr, "residual norm");
            record_interior_trace(k, nr, norm_x_next,
                                  tridiag_.empty() ? 0.0 : tridiag_.diagonal().back(),
                                  gamma_next_);
            if (cfg_.keep_history && !replaying()) {
                out_.history.iterates.push_back(x_);
                out_.history.residuals.push_back(r_);
            }
            if (nr < tol_) return true;

            const double beta = (nr * nr) / (norm_r_ * norm_r_);
            DenseMatrix p_next = -1.0 * r_;
            add_scaled(p_next, beta, p_);
            p_ = std::move(p_next);
            norm_r_ = nr;
            if (cfg_.keep_history && !replaying()) out_.history.directions.push_back(p_);

            if (iterations_ >= max_iter_) {
                SolveOutcome best = snapshot_interior();
                throw_iteration_limit(std::move(best));
            }
        }
    }

    /// One step of the explicit recurrence: normalize Q from (t_next, gamma),
    /// append (gamma, delta) to the tridiagonal matrix, compute the successor.
    void advance_chain() {
        DenseMatrix q = (1.0 / gamma_next_) * t_next_;
        if (cfg_.reorthogonalize && !basis_.empty()) {
            reorthogonalize(q);
            const double nq = frob_norm(q);
            if (nq <= 0.0) throw NumericalError("re-orthogonalization annihilated a direction");
            q = (1.0 / nq) * q;
        }
        emit_q(q);
        const DenseMatrix fq = op_.apply(q);
        const double delta_k = frob_inner(fq, fq);
        check_finite(delta_k, "tridiagonal diagonal entry");
        DenseMatrix t = op_.apply_adjoint(fq);
        add_scaled(t, -delta_k, q);
        if (!q_curr_.empty()) add_scaled(t, -gamma_next_, q_curr_);
        if (tridiag_.empty()) {
            tridiag_.append(delta_k);
        } else {
            tridiag_.append(gamma_next_, delta_k);
        }
        q_prev_ = std::move(q_curr_);
        q_curr_ = std::move(q);
        t_next_ = std::move(t);
        gamma_next_ = frob_norm(t_next_);
        check_finite(gamma_next_, "tridiagonal off-diagonal entry");
    }

    // ---- interior phase, coefficient-derived variant ---------------------
    //
    // Q_k = (-1)^k R_k/||R_k||, delta_k = 1/alpha_k (+ beta_{k-1}/alpha_{k-1}
    // for k > 0), gamma_{k+1} = sqrt(beta_k)/alpha_k; no extra operator
    // applications during CG.

    bool interior_simplified() {
        double alpha_prev = 0.0;
        double beta_prev = 0.0;
        double gamma_pending = 0.0;  // gamma_k, the off-diagonal below delta_k
        for (std::size_t k = 0;; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            DenseMatrix q = (sign / norm_r_) * r_;
            emit_q(q);
            q_prev_ = std::move(q_curr_);
            q_curr_ = std::move(q);

            const DenseMatrix fp = op_.apply(p_);
            const double norm_fp = frob_norm(fp);
            check_finite(norm_fp, "mapped direction norm");
            if (cfg_.keep_history && !replaying()) out_.history.mapped_directions.push_back(fp);
            if (norm_fp <= tol_) {
                // f(P_k) vanished before delta_k existed: compute it
                // explicitly and hand the chain to the boundary phase.
                complete_chain_at_current(gamma_pending);
                return false;
            }

            const double alpha = (norm_r_ * norm_r_) / (norm_fp * norm_fp);
            check_finite(alpha, "step length");
            const double delta_k = 1.0 / alpha + (k > 0 ? beta_prev / alpha_prev : 0.0);
            if (k == 0) {
                tridiag_.append(delta_k);
            } else {
                tridiag_.append(gamma_pending, delta_k);
            }

            DenseMatrix x_next = x_;
            add_scaled(x_next, alpha, p_);
            const double norm_x_next = frob_norm(x_next);
            ++iterations_;

            DenseMatrix r_next = r_;
            add_scaled(r_next, alpha, op_.apply_adjoint(fp));
            const double nr = frob_norm(r_next);
            check_finite(nr, "residual norm");
            const double beta = (nr * nr) / (norm_r_ * norm_r_);
            gamma_pending = std::sqrt(beta) / alpha;  // gamma_{k+1}

            if (norm_x_next > cfg_.delta) {
                // The step leaves the ball.  The recurrence data for index
                // k+1 is still well defined, so seed the boundary chain with
                // Q_{k+1} before switching.
                if (nr <= tol_) {
                    // Unconstrained optimum outside the ball: the current
                    // subspace already contains the boundary solution.
                    t_next_ = DenseMatrix(m_, n_);
                    gamma_next_ = 0.0;
                    return false;
                }
                const double sign_next = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
                DenseMatrix q_next = (sign_next / nr) * r_next;
                emit_q(q_next);
                q_prev_ = std::move(q_curr_);
                q_curr_ = std::move(q_next);
                complete_chain_at_current(gamma_pending);
                return false;
            }

            x_ = std::move(x_next);
            r_ = std::move(r_next);
            record_interior_trace(k, nr, norm_x_next, delta_k, gamma_pending);
            if (cfg_.keep_history && !replaying()) {
                out_.history.iterates.push_back(x_);
                out_.history.residuals.push_back(r_);
            }
            if (nr < tol_) return true;

            DenseMatrix p_next = -1.0 * r_;
            add_scaled(p_next, beta, p_);
            p_ = std::move(p_next);
            norm_r_ = nr;
            alpha_prev = alpha;
            beta_prev = beta;
            if (cfg_.keep_history && !replaying()) out_.history.directions.push_back(p_);

            if (iterations_ >= max_iter_) {
                SolveOutcome best = snapshot_interior();
                throw_iteration_limit(std::move(best));
            }
        }
    }

    /// Establishes the boundary-phase invariant when the latest direction
    /// Q_j exists but delta_j does not: computes delta_j = ||f(Q_j)||^2
    /// explicitly, appends it under the pending off-diagonal, and forms the
    /// unnormalized successor t_{j+1}.
    void complete_chain_at_current(double gamma_pending) {
        const DenseMatrix fq = op_.apply(q_curr_);
        const double delta_j = frob_inner(fq, fq);
        check_finite(delta_j, "tridiagonal diagonal entry");
        if (tridiag_.empty()) {
            tridiag_.append(delta_j);
        } else {
            tridiag_.append(gamma_pending, delta_j);
        }
        DenseMatrix t = op_.apply_adjoint(fq);
        add_scaled(t, -delta_j, q_curr_);
        if (!q_prev_.empty() && gamma_pending != 0.0) add_scaled(t, -gamma_pending, q_prev_);
        t_next_ = std::move(t);
        gamma_next_ = frob_norm(t_next_);
        check_finite(gamma_next_, "tridiagonal off-diagonal entry");
    }

    // ---- boundary phase --------------------------------------------------
    //
    // Invariant at loop top: tridiag_ holds delta_0..delta_j, the retained or
    // replayed basis holds Q_0..Q_j, and (t_next_, gamma_next_) hold the
    // unnormalized successor.  Each pass solves the tridiagonal trust-region
    // subproblem and stops when gamma_{j+1}*|h_j[j]| drops below tolerance.

    SolveOutcome boundary() {
        double warm = 0.0;
        for (;;) {
            if (replaying()) {
                if (tridiag_.dim() >= replay_->coeff->size()) {
                    return std::move(out_);  // replay complete; accum holds the solution
                }
            } else {
                TrsOptions topt;
                topt.eps = cfg_.eps;
                topt.lambda_warm_start = warm;
                TrsResult trs = trs_solve(tridiag_, gamma0_, cfg_.delta, topt);
                warm = trs.boundary ? trs.lambda : 0.0;

                const double stat = gamma_next_ * std::abs(trs.h.back());
                double h_norm = 0.0;
                for (double v : trs.h) h_norm += v * v;
                h_norm = std::sqrt(h_norm);
                if (cfg_.trace) {
                    out_.trace.push_back({iterations_, Branch::Boundary, stat, h_norm,
                                          tridiag_.diagonal().back(), gamma_next_});
                }
                if (stat < tol_) return finish_boundary(trs);
                if (iterations_ >= max_iter_) {
                    throw_iteration_limit(finish_boundary(trs));
                }
                if (gamma_next_ <= 0.0) {
                    // Exhausted recurrence: nothing further to add, so the
                    // current subproblem solution is final.
                    return finish_boundary(trs);
                }
            }

            advance_chain();
            ++iterations_;
        }
    }

    SolveOutcome finish_boundary(const TrsResult& trs) {
        if (cfg_.basis_policy == BasisPolicy::Retain) {
            out_.x_star = assemble_boundary_solution(basis_, trs.h);
        } else {
            DenseMatrix accum(m_, n_);
            ReplayPlan plan;
            plan.coeff = &trs.h;
            plan.accum = &accum;
            Runner second(op_, e_, cfg_, &plan);
            second.run();
            if (plan.produced < trs.h.size()) {
                throw NumericalError("replay pass produced fewer directions than expected");
            }
            out_.x_star = std::move(accum);
        }
        out_.branch = Branch::Boundary;
        finish_diagnostics(trs.lambda);
        return std::move(out_);
    }

    SolveOutcome snapshot_interior() {
        SolveOutcome best = out_;
        best.x_star = x_;
        best.branch = Branch::Interior;
        best.iterations = iterations_;
        best.tridiag = tridiag_;
        const DenseMatrix fx = op_.apply(best.x_star);
        DenseMatrix diff = fx;
        add_scaled(diff, -1.0, e_);
        best.residual = frob_norm(diff);
        DenseMatrix g = op_.apply_adjoint(fx);
        add_scaled(g, -1.0, fstar_e_);
        best.kkt_residual = frob_norm(g);
        best.lambda_star = 0.0;
        best.comp_slack = 0.0;
        return best;
    }

    void finish_diagnostics(double lambda) {
        out_.lambda_star = lambda;
        out_.iterations = iterations_;
        out_.tridiag = tridiag_;
        const DenseMatrix fx = op_.apply(out_.x_star);
        DenseMatrix diff = fx;
        add_scaled(diff, -1.0, e_);
        out_.residual = frob_norm(diff);
        DenseMatrix g = op_.apply_adjoint(fx);
        add_scaled(g, -1.0, fstar_e_);
        add_scaled(g, lambda, out_.x_star);
        out_.kkt_residual = frob_norm(g);
        out_.comp_slack = lambda * (frob_norm(out_.x_star) - cfg_.delta);
    }

    const MatrixOperator& op_;
    const DenseMatrix& e_;
    SolverConfig cfg_;
    ReplayPlan* replay_;
    std::size_t m_;
    std::size_t n_;
    std::size_t max_iter_ = 0;
    std::size_t iterations_ = 0;

    DenseMatrix fstar_e_;
    double gamma0_ = 0.0;
    double tol_ = 0.0;

    DenseMatrix x_;
    DenseMatrix r_;
    DenseMatrix p_;
    double norm_r_ = 0.0;

    SymTridiagonal tridiag_;
    std::vector<DenseMatrix> basis_;
    DenseMatrix q_prev_;
    DenseMatrix q_curr_;
    DenseMatrix t_next_;
    double gamma_next_ = 0.0;

    SolveOutcome out_;
};

}  // namespace

SolveOutcome solve(const MatrixOperator& op, const DenseMatrix& e, const SolverConfig& cfg) {
    validate_config(cfg);
    Runner runner(op, e, cfg, nullptr);
    return runner.run();
}

SolveOutcome solve(const EquationSpec& spec, const DenseMatrix& e, const SolverConfig& cfg) {
    EquationOperator op(spec);
    return solve(op, e, cfg);
}

LanczosState lanczos_start(const MatrixOperator& op, const DenseMatrix& t0, bool retain_basis) {
    const double gamma = frob_norm(t0);
    if (gamma <= 0.0) throw ValueError("cannot seed the recurrence with a zero matrix");
    LanczosState s;
    s.q_curr = (1.0 / gamma) * t0;
    if (retain_basis) s.basis.push_back(s.q_curr);
    const DenseMatrix fq = op.apply(s.q_curr);
    const double delta0 = frob_inner(fq, fq);
    s.tridiag.append(delta0);
    s.t_next = op.apply_adjoint(fq);
    add_scaled(s.t_next, -delta0, s.q_curr);
    s.gamma_next = frob_norm(s.t_next);
    return s;
}

void lanczos_step(const MatrixOperator& op, LanczosState& state) {
    // Below roundoff relative to the accumulated matrix, the unnormalized
    // successor is numerical noise: the recurrence has terminated.
    const double floor = 1e-13 * std::max(1.0, state.tridiag.max_abs());
    if (state.gamma_next <= floor) {
        throw NumericalError("the recurrence has terminated (vanished off-diagonal)");
    }
    DenseMatrix q = (1.0 / state.gamma_next) * state.t_next;
    if (!state.basis.empty()) state.basis.push_back(q);
    const DenseMatrix fq = op.apply(q);
    const double delta_k = frob_inner(fq, fq);
    DenseMatrix t = op.apply_adjoint(fq);
    add_scaled(t, -delta_k, q);
    add_scaled(t, -state.gamma_next, state.q_curr);
    state.tridiag.append(state.gamma_next, delta_k);
    state.q_prev = std::move(state.q_curr);
    state.q_curr = std::move(q);
    state.t_next = std::move(t);
    state.gamma_next = frob_norm(state.t_next);
}

DenseMatrix assemble_boundary_solution(const std::vector<DenseMatrix>& basis,
                                       const std::vector<double>& h) {
    if (basis.empty()) throw DimensionError("cannot assemble from an empty basis");
    if (basis.size() != h.size()) {
        throw DimensionError("basis holds " + std::to_string(basis.size()) +
                             " directions but the coefficient vector has " +
                             std::to_string(h.size()));
    }
    DenseMatrix x(basis.front().rows(), basis.front().cols());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        add_scaled(x, h[i], basis[i]);
    }
    return x;
}

}  // namespace glme
