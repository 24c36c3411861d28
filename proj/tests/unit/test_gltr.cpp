#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"
#include "glme/errors.hpp"
#include "glme/gltr.hpp"
#include "glme/operator.hpp"
#include "glme/structured_factor.hpp"
#include "test_util.hpp"

using glme::Branch;
using glme::DenseMatrix;
using glme::EquationOperator;
using glme::EquationSpec;
using glme::SolveOutcome;
using glme::SolverConfig;
using glme::StructuredFactor;
using glme::Variant;
using glme_test::fill;

namespace {

EquationSpec identity_map(std::size_t n) {
    return EquationSpec::axb(StructuredFactor::identity(n), StructuredFactor::identity(n));
}

EquationSpec random_two_term(std::size_t n, unsigned seed) {
    return EquationSpec::generalized_sylvester(
        StructuredFactor::dense(fill(n, n, seed)), StructuredFactor::dense(fill(n, n, seed + 1)),
        StructuredFactor::dense(fill(n, n, seed + 2)),
        StructuredFactor::dense(fill(n, n, seed + 3)));
}

}  // namespace

TEST_CASE("identity map: unconstrained solution inside the ball") {
    const EquationSpec spec = identity_map(2);
    const DenseMatrix e{{3.0, 0.0}, {0.0, 4.0}};
    for (Variant variant : {Variant::Basic31, Variant::Simplified41}) {
        CAPTURE(static_cast<int>(variant));
        SolverConfig cfg;
        cfg.variant = variant;
        const SolveOutcome out = glme::solve(spec, e, cfg);
        CHECK(out.branch == Branch::Interior);
        CHECK(out.iterations == 1);
        CHECK(out.gamma0 == doctest::Approx(5.0));
        CHECK(glme::max_abs_diff(out.x_star, e) <= 1e-12);
        CHECK(out.lambda_star == 0.0);
        CHECK(out.residual <= 1e-12);
        CHECK(out.kkt_residual <= 1e-12);
        CHECK(out.tridiag.dim() >= 1);
        CHECK(out.tridiag.diag(0) == doctest::Approx(1.0));
        REQUIRE(!out.trace.empty());
        CHECK(out.trace.front().branch == Branch::Interior);
    }
}

TEST_CASE("identity map: solution clipped to the ball") {
    const EquationSpec spec = identity_map(2);
    const DenseMatrix e{{2.0, 0.0}, {0.0, 0.0}};
    for (Variant variant : {Variant::Basic31, Variant::Simplified41}) {
        CAPTURE(static_cast<int>(variant));
        SolverConfig cfg;
        cfg.variant = variant;
        cfg.delta = 1.0;
        const SolveOutcome out = glme::solve(spec, e, cfg);
        CHECK(out.branch == Branch::Boundary);
        CHECK(out.lambda_star == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(out.x_star(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(out.x_star(0, 1)) <= 1e-12);
        CHECK(glme::frob_norm(out.x_star) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.kkt_residual <= 1e-10);
        CHECK(std::abs(out.comp_slack) <= 1e-10);
    }
}

TEST_CASE("zero right-hand side returns the zero solution") {
    const EquationSpec spec = identity_map(2);
    const SolveOutcome out = glme::solve(spec, DenseMatrix(2, 2));
    CHECK(out.iterations == 0);
    CHECK(glme::frob_norm(out.x_star) == 0.0);
    CHECK(out.residual == 0.0);
    CHECK(out.gamma0 == 0.0);
}

TEST_CASE("interior convergence on a two-term equation satisfies the normal equations") {
    const EquationSpec spec = random_two_term(3, 41);
    const DenseMatrix e = fill(3, 3, 50);
    SolverConfig cfg;
    cfg.eps = 1e-12;
    const SolveOutcome out = glme::solve(spec, e, cfg);
    CHECK(out.branch == Branch::Interior);
    CHECK(out.kkt_residual <= 1e-10 * out.gamma0);
    CHECK(glme::frob_norm(out.x_star) <= cfg.delta * (1.0 + 1e-12));
    // The interior trace must carry strictly positive iterate norms.
    for (const auto& row : out.trace) {
        CHECK(row.branch == Branch::Interior);
        CHECK(row.norm_x > 0.0);
    }
}

TEST_CASE("boundary convergence on a two-term equation satisfies the optimality system") {
    const EquationSpec spec = random_two_term(3, 61);
    const DenseMatrix e = fill(3, 3, 70);
    SolverConfig cfg;
    cfg.delta = 0.05;
    const SolveOutcome out = glme::solve(spec, e, cfg);
    CHECK(out.branch == Branch::Boundary);
    CHECK(out.lambda_star > 0.0);
    CHECK(glme::frob_norm(out.x_star) == doctest::Approx(cfg.delta).epsilon(1e-9));
    CHECK(out.kkt_residual <= 1e-8 * out.gamma0);
    CHECK(std::abs(out.comp_slack) <= 1e-8 * cfg.delta);
    const bool has_boundary_row =
        std::any_of(out.trace.begin(), out.trace.end(),
                    [](const glme::TraceRecord& r) { return r.branch == Branch::Boundary; });
    CHECK(has_boundary_row);
}

TEST_CASE("iteration variants agree on the clipped solution") {
    const EquationSpec spec = random_two_term(3, 81);
    const DenseMatrix e = fill(3, 3, 90);
    SolverConfig a;
    a.variant = Variant::Basic31;
    a.delta = 0.05;
    SolverConfig b = a;
    b.variant = Variant::Simplified41;
    const SolveOutcome out_a = glme::solve(spec, e, a);
    const SolveOutcome out_b = glme::solve(spec, e, b);
    CHECK(out_a.branch == Branch::Boundary);
    CHECK(out_b.branch == Branch::Boundary);
    CHECK(glme::max_abs_diff(out_a.x_star, out_b.x_star) <= 1e-8);
    CHECK(out_a.lambda_star == doctest::Approx(out_b.lambda_star).epsilon(1e-8));
    const std::size_t shared = std::min(out_a.tridiag.dim(), out_b.tridiag.dim());
    for (std::size_t i = 0; i < shared; ++i) {
        CHECK(out_a.tridiag.diag(i) ==
              doctest::Approx(out_b.tridiag.diag(i)).epsilon(1e-6));
    }
}

TEST_CASE("basis-free accumulation reproduces the retained-basis solution") {
    const EquationSpec spec = random_two_term(4, 101);
    const DenseMatrix e = fill(4, 4, 110);
    SolverConfig retain;
    retain.delta = 0.05;
    SolverConfig twopass = retain;
    twopass.basis_policy = glme::BasisPolicy::TwoPass;
    for (Variant variant : {Variant::Basic31, Variant::Simplified41}) {
        CAPTURE(static_cast<int>(variant));
        retain.variant = variant;
        twopass.variant = variant;
        const SolveOutcome a = glme::solve(spec, e, retain);
        const SolveOutcome b = glme::solve(spec, e, twopass);
        CHECK(a.branch == Branch::Boundary);
        CHECK(glme::max_abs_diff(a.x_star, b.x_star) <= 1e-13);
        CHECK(a.lambda_star == doctest::Approx(b.lambda_star).epsilon(1e-12));
    }
}

TEST_CASE("re-orthogonalization leaves the solution unchanged") {
    const EquationSpec spec = random_two_term(3, 121);
    const DenseMatrix e = fill(3, 3, 130);
    SolverConfig plain;
    plain.variant = Variant::Basic31;
    plain.delta = 0.05;
    SolverConfig reortho = plain;
    reortho.reorthogonalize = true;
    const SolveOutcome a = glme::solve(spec, e, plain);
    const SolveOutcome b = glme::solve(spec, e, reortho);
    CHECK(glme::max_abs_diff(a.x_star, b.x_star) <= 1e-8);
}

TEST_CASE("retained diagnostic sequences are consistent") {
    const EquationSpec spec = random_two_term(3, 141);
    const DenseMatrix e = fill(3, 3, 150);
    SolverConfig cfg;
    cfg.delta = 0.05;
    cfg.keep_history = true;
    const SolveOutcome out = glme::solve(spec, e, cfg);
    REQUIRE(!out.history.lanczos_q.empty());
    CHECK(out.history.lanczos_q.size() == out.tridiag.dim());
    // Orthonormal directions.
    for (std::size_t i = 0; i < out.history.lanczos_q.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            CHECK(glme::frob_inner(out.history.lanczos_q[i], out.history.lanczos_q[j]) ==
                  doctest::Approx(want).epsilon(1e-6).scale(1.0));
        }
    }
    CHECK(!out.history.residuals.empty());
    CHECK(!out.history.directions.empty());
}

TEST_CASE("iteration cap raises an error carrying the best iterate") {
    const EquationSpec spec = random_two_term(3, 161);
    const DenseMatrix e = fill(3, 3, 170);
    SolverConfig cfg;
    cfg.max_iter = 1;
    try {
        glme::solve(spec, e, cfg);
        FAIL("expected the iteration cap to trigger");
    } catch (const glme::IterationLimitError& err) {
        CHECK(err.best().iterations == 1);
        CHECK(err.best().x_star.rows() == 3);
        CHECK(err.best().x_star.cols() == 3);
        CHECK(err.best().residual > 0.0);
    }
}

TEST_CASE("configuration and shape validation") {
    const EquationSpec spec = identity_map(2);
    const DenseMatrix e{{1.0, 0.0}, {0.0, 1.0}};
    SolverConfig bad;
    bad.delta = 0.0;
    CHECK_THROWS_AS(glme::solve(spec, e, bad), glme::ValueError);
    bad = SolverConfig{};
    bad.eps = -1.0;
    CHECK_THROWS_AS(glme::solve(spec, e, bad), glme::ValueError);
    bad = SolverConfig{};
    bad.reorthogonalize = true;
    bad.basis_policy = glme::BasisPolicy::TwoPass;
    CHECK_THROWS_AS(glme::solve(spec, e, bad), glme::ValueError);
    CHECK_THROWS_AS(glme::solve(spec, fill(3, 3, 1), SolverConfig{}), glme::DimensionError);
}

TEST_CASE("three-term recurrence: identity map terminates after one direction") {
    const EquationOperator op(identity_map(2));
    const DenseMatrix t0{{3.0, 4.0}, {0.0, 0.0}};
    glme::LanczosState state = glme::lanczos_start(op, t0);
    CHECK(state.tridiag.dim() == 1);
    CHECK(state.tridiag.diag(0) == doctest::Approx(1.0));
    CHECK(state.gamma_next <= 1e-14);
    CHECK(state.basis.size() == 1);
    CHECK(glme::frob_norm(state.q_curr) == doctest::Approx(1.0));
    CHECK_THROWS_AS(glme::lanczos_step(op, state), glme::NumericalError);
    CHECK_THROWS_AS(glme::lanczos_start(op, DenseMatrix(2, 2)), glme::ValueError);
}

TEST_CASE("three-term recurrence: orthonormal chain with matching projections") {
    const EquationSpec spec = EquationSpec::classical_sylvester(
        StructuredFactor::dense(fill(3, 3, 181)), StructuredFactor::dense(fill(3, 3, 182)));
    const EquationOperator op(spec);
    glme::LanczosState state = glme::lanczos_start(op, fill(3, 3, 183));
    for (int step = 0; step < 4; ++step) {
        REQUIRE(state.gamma_next > 1e-12);
        glme::lanczos_step(op, state);
    }
    REQUIRE(state.basis.size() == 5);
    for (std::size_t i = 0; i < state.basis.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            CHECK(glme::frob_inner(state.basis[i], state.basis[j]) ==
                  doctest::Approx(want).epsilon(1e-8).scale(1.0));
        }
    }
    // Diagonal entries are the energies of the mapped directions, off-diagonal
    // entries the couplings between consecutive mapped directions.
    for (std::size_t k = 0; k < state.tridiag.dim(); ++k) {
        const DenseMatrix fq = op.apply(state.basis[k]);
        CHECK(state.tridiag.diag(k) == doctest::Approx(glme::frob_inner(fq, fq)).epsilon(1e-10));
        if (k + 1 < state.tridiag.dim()) {
            const DenseMatrix fq_next = op.apply(state.basis[k + 1]);
            CHECK(state.tridiag.off(k) ==
                  doctest::Approx(glme::frob_inner(fq, fq_next)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("combining orthonormal directions") {
    const DenseMatrix b0{{1.0, 0.0}, {0.0, 0.0}};
    const DenseMatrix b1{{0.0, 1.0}, {0.0, 0.0}};
    const DenseMatrix x = glme::assemble_boundary_solution({b0, b1}, {2.0, -3.0});
    CHECK(x(0, 0) == doctest::Approx(2.0));
    CHECK(x(0, 1) == doctest::Approx(-3.0));
    CHECK(x(1, 0) == 0.0);
    CHECK_THROWS_AS(glme::assemble_boundary_solution({}, {}), glme::DimensionError);
    CHECK_THROWS_AS(glme::assemble_boundary_solution({b0}, {1.0, 2.0}), glme::DimensionError);
}
