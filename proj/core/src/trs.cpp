#include "glme/trs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glme/errors.hpp"

namespace glme {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// 0.5 h^T T h + gamma0 * h[0].
double model_value(const SymTridiagonal& t, double gamma0, const std::vector<double>& h) {
    const std::vector<double> th = t.mul(h);
    return 0.5 * dot(h, th) + gamma0 * h[0];
}

/// Solves (T + shift I) h = -gamma0 e1 through an existing factorization.
std::vector<double> solve_rhs(const BidiagCholesky& fac, double gamma0) {
    std::vector<double> h(fac.diag.size(), 0.0);
    h[0] = -gamma0;
    solve_lower(fac, h);
    solve_upper(fac, h);
    return h;
}

/// Runs normalized inverse-iteration passes through an existing factorization
/// of T + shift I, returning a unit vector aligned with the eigenvector of
/// the smallest eigenvalue of T (increasingly so as the shift approaches it).
std::vector<double> inverse_iteration(const BidiagCholesky& fac) {
    const std::size_t n = fac.diag.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (i % 2 == 0) ? 1.0 : -1.0;
    for (int pass = 0; pass < 8; ++pass) {
        solve_lower(fac, z);
        solve_upper(fac, z);
        const double nz = norm2(z);
        if (nz == 0.0) throw NumericalError("inverse iteration collapsed to zero");
        for (double& v : z) v /= nz;
    }
    return z;
}

/// Approximates an eigenvector for the smallest eigenvalue of T by inverse
/// iteration with the (slightly regularized) shift `lambda`.
std::vector<double> smallest_eigvec(const SymTridiagonal& t, double lambda) {
    const double scale = std::max(1.0, t.max_abs() + std::abs(lambda));
    BidiagCholesky fac;
    double shift = lambda;
    double bump = 1e-14 * scale;
    while (!try_cholesky_shifted(t, shift, fac)) {
        shift += bump;
        bump *= 10.0;
        if (bump > scale) {
            throw NumericalError("inverse iteration could not regularize the shifted matrix");
        }
    }
    return inverse_iteration(fac);
}

}  // namespace

bool try_cholesky_shifted(const SymTridiagonal& t, double shift, BidiagCholesky& out) {
    const std::size_t n = t.dim();
    if (n == 0) throw ValueError("cannot factor an empty matrix");
    const double tol = 1e-14 * std::max(1.0, t.max_abs() + std::abs(shift));
    out.diag.assign(n, 0.0);
    out.subdiag.assign(n == 0 ? 0 : n - 1, 0.0);
    double pivot = t.diag(0) + shift;
    if (pivot <= tol) return false;
    out.diag[0] = std::sqrt(pivot);
    for (std::size_t i = 1; i < n; ++i) {
        const double sub = t.off(i - 1) / out.diag[i - 1];
        out.subdiag[i - 1] = sub;
        pivot = t.diag(i) + shift - sub * sub;
        if (pivot <= tol) return false;
        out.diag[i] = std::sqrt(pivot);
    }
    return true;
}

void solve_lower(const BidiagCholesky& l, std::vector<double>& rhs) {
    const std::size_t n = l.diag.size();
    if (rhs.size() != n) throw DimensionError("forward substitution: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        double v = rhs[i];
        if (i > 0) v -= l.subdiag[i - 1] * rhs[i - 1];
        rhs[i] = v / l.diag[i];
    }
}

void solve_upper(const BidiagCholesky& l, std::vector<double>& rhs) {
    const std::size_t n = l.diag.size();
    if (rhs.size() != n) throw DimensionError("back substitution: size mismatch");
    for (std::size_t i = n; i-- > 0;) {
        double v = rhs[i];
        if (i + 1 < n) v -= l.subdiag[i] * rhs[i + 1];
        rhs[i] = v / l.diag[i];
    }
}

TrsResult trs_solve(const SymTridiagonal& t, double gamma0, double delta,
                    const TrsOptions& options) {
    if (t.empty()) throw ValueError("trust-region subproblem requires a non-empty matrix");
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw ValueError("trust-region radius must be positive and finite");
    }
    if (!std::isfinite(gamma0) || gamma0 < 0.0) {
        throw ValueError("gradient magnitude must be non-negative and finite");
    }
    if (options.eps <= 0.0) throw ValueError("tolerance must be positive");

    TrsResult result;
    BidiagCholesky fac;

    // Interior shortcut: positive definite T with an interior Newton point.
    if (try_cholesky_shifted(t, 0.0, fac)) {
        std::vector<double> h = solve_rhs(fac, gamma0);
        const double hnorm = norm2(h);
        if (hnorm <= delta) {
            result.h = std::move(h);
            result.lambda = 0.0;
            result.boundary = hnorm >= delta * (1.0 - 1e-12);
            result.objective = model_value(t, gamma0, result.h);
            return result;
        }
    }

    // Boundary phase.  The multiplier lives in [lambda_lo, lambda_hi]:
    // lambda_hi = gamma0/delta - (Gershgorin lower bound) makes T + lambda I
    // strictly diagonally dominant with margin gamma0/delta, so the
    // factorization there succeeds and its solution is feasible.
    const double gersh = t.gershgorin_min();
    double lambda_lo = 0.0;
    double lambda_hi = std::max(0.0, gamma0 / delta - gersh);
    if (lambda_hi <= lambda_lo) lambda_hi = lambda_lo + std::max(1.0, std::abs(gersh));

    double lambda = options.lambda_warm_start;
    if (!std::isfinite(lambda) || lambda < lambda_lo) lambda = lambda_lo;
    if (lambda > lambda_hi) lambda = lambda_hi;

    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        result.newton_iters = iter;

        if (!try_cholesky_shifted(t, lambda, fac)) {
            // Not positive definite: the multiplier must be larger.
            lambda_lo = std::max(lambda_lo, lambda);
            lambda = 0.5 * (lambda_lo + lambda_hi);
            result.lambda_history.push_back(lambda);
            continue;
        }

        std::vector<double> h = solve_rhs(fac, gamma0);
        const double hnorm = norm2(h);
        if (hnorm >= delta) {
            lambda_lo = std::max(lambda_lo, lambda);
        } else {
            lambda_hi = std::min(lambda_hi, lambda);
            if (hnorm < delta * (1.0 - options.eps)) {
                // Any unit z gives z^T T z >= mu_min, so -z^T T z is a
                // certified lower bound on the multiplier.  Inverse iteration
                // through the factorization in hand sharpens it toward
                // -mu_min, which collapses the bracket in a few steps when
                // the boundary equation has no root above it (the gradient
                // missing the bottom eigendirection) instead of by bisection.
                const std::vector<double> z = inverse_iteration(fac);
                const std::vector<double> tz = t.mul(z);
                lambda_lo = std::max(lambda_lo, -dot(z, tz));
                if (lambda_hi < lambda_lo) lambda_hi = lambda_lo;
            }
        }

        if (std::abs(hnorm - delta) <= options.eps * delta) {
            if (hnorm > delta) {
                for (double& v : h) v *= delta / hnorm;
            }
            result.h = std::move(h);
            result.lambda = lambda;
            result.boundary = true;
            result.objective = model_value(t, gamma0, result.h);
            return result;
        }

        // Newton step for the reciprocal boundary equation
        // 1/delta - 1/||h(lambda)|| = 0, evaluated through L w = h.
        std::vector<double> w = h;
        solve_lower(fac, w);
        const double wnorm = norm2(w);
        double lambda_next;
        if (wnorm > 0.0 && hnorm > 0.0) {
            const double ratio = hnorm / wnorm;
            lambda_next = lambda + ((hnorm - delta) / delta) * ratio * ratio;
        } else {
            lambda_next = 0.5 * (lambda_lo + lambda_hi);
        }
        // The top of the bracket is always safe to factor, so a step landing
        // exactly there is accepted; anything outside the bracket is replaced
        // by a safeguarded point.  From inside the ball, a Newton candidate
        // at or below the certified lower bound means the boundary equation
        // may have no root above it, so close in on the bound geometrically
        // (the bound itself tightens each pass); otherwise bisect.
        if (!(lambda_next > lambda_lo) || lambda_next > lambda_hi) {
            if (hnorm < delta && lambda > lambda_lo) {
                lambda_next = lambda_lo + 0.01 * (lambda - lambda_lo);
            } else {
                lambda_next = 0.5 * (lambda_lo + lambda_hi);
            }
        }

        // The iteration has stalled once the bracket collapses or the
        // multiplier stops moving.  A stalled iterate essentially on the
        // boundary is the answer; a stalled iterate strictly inside means the
        // gradient has (numerically) no component along the most negative
        // eigendirection, so the minimizer needs an explicit eigenvector
        // contribution to reach the boundary.
        const bool bracket_collapsed =
            lambda_hi - lambda_lo <= options.eps * std::max(1.0, std::abs(lambda_hi));
        const bool multiplier_stalled =
            std::abs(lambda_next - lambda) <= options.eps * (1.0 + std::abs(lambda));
        if (bracket_collapsed || multiplier_stalled) {
            if (hnorm >= delta * (1.0 - 1e-7)) {
                if (hnorm > delta) {
                    for (double& v : h) v *= delta / hnorm;
                }
                result.h = std::move(h);
                result.lambda = lambda;
                result.boundary = true;
                result.objective = model_value(t, gamma0, result.h);
                return result;
            }
            const std::vector<double> z = smallest_eigvec(t, lambda);
            const double hz = dot(h, z);
            const double disc = std::sqrt(hz * hz + (delta * delta - hnorm * hnorm));
            const double tau_a = -hz + disc;
            const double tau_b = -hz - disc;
            std::vector<double> ha = h;
            std::vector<double> hb = h;
            for (std::size_t i = 0; i < h.size(); ++i) {
                ha[i] += tau_a * z[i];
                hb[i] += tau_b * z[i];
            }
            const double qa = model_value(t, gamma0, ha);
            const double qb = model_value(t, gamma0, hb);
            result.h = (qa <= qb) ? std::move(ha) : std::move(hb);
            result.lambda = lambda;
            result.boundary = true;
            result.hard_case = true;
            result.objective = std::min(qa, qb);
            return result;
        }

        lambda = lambda_next;
        result.lambda_history.push_back(lambda);
    }

    throw ConvergenceError("trust-region subproblem: no convergence within " +
                           std::to_string(options.max_iter) + " iterations");
}

}  // namespace glme
