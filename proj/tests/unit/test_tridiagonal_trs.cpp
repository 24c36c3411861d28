#include <doctest.h>

#include <cmath>
#include <vector>

#include "glme/errors.hpp"
#include "glme/tridiagonal.hpp"
#include "glme/trs.hpp"

using glme::BidiagCholesky;
using glme::SymTridiagonal;
using glme::TrsOptions;
using glme::TrsResult;

namespace {

SymTridiagonal make_tridiag(const std::vector<double>& diag, const std::vector<double>& off) {
    SymTridiagonal t;
    t.append(diag.at(0));
    for (std::size_t i = 1; i < diag.size(); ++i) t.append(off.at(i - 1), diag[i]);
    return t;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// || (T + lambda I) h + gamma0 e1 ||.
double stationarity(const SymTridiagonal& t, double gamma0, const TrsResult& r) {
    std::vector<double> g = t.mul(r.h);
    g[0] += gamma0;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += r.lambda * r.h[i];
    return norm2(g);
}

}  // namespace

TEST_CASE("tridiagonal growth and accessors") {
    SymTridiagonal t;
    CHECK(t.empty());
    CHECK_THROWS_AS(t.append(0.5, 1.0), glme::ValueError);
    t.append(2.0);
    CHECK_THROWS_AS(t.append(3.0), glme::ValueError);
    t.append(1.0, 3.0);
    t.append(-1.0, 4.0);
    CHECK(t.dim() == 3);
    CHECK(t.diag(1) == 3.0);
    CHECK(t.off(1) == -1.0);
    CHECK_THROWS_AS(t.diag(3), glme::DimensionError);
    CHECK_THROWS_AS(t.off(2), glme::DimensionError);
    CHECK_THROWS_AS(t.append(std::nan(""), 1.0), glme::ValueError);

    const std::vector<double> y = t.mul({1.0, 2.0, 3.0});
    CHECK(y[0] == doctest::Approx(4.0));
    CHECK(y[1] == doctest::Approx(4.0));
    CHECK(y[2] == doctest::Approx(10.0));
    CHECK_THROWS_AS(t.mul({1.0}), glme::DimensionError);

    CHECK(t.max_abs() == 4.0);
    CHECK(t.gershgorin_min() == doctest::Approx(1.0));
}

TEST_CASE("bidiagonal factorization") {
    SUBCASE("one entry") {
        const SymTridiagonal t = make_tridiag({4.0}, {});
        BidiagCholesky l;
        REQUIRE(try_cholesky_shifted(t, 0.0, l));
        CHECK(l.diag[0] == doctest::Approx(2.0));
        CHECK(l.subdiag.empty());
    }
    SUBCASE("two entries, frozen factor") {
        const SymTridiagonal t = make_tridiag({2.0, 2.0}, {1.0});
        BidiagCholesky l;
        REQUIRE(try_cholesky_shifted(t, 0.0, l));
        CHECK(l.diag[0] == doctest::Approx(std::sqrt(2.0)));
        CHECK(l.subdiag[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(l.diag[1] == doctest::Approx(std::sqrt(1.5)));

        // Forward then backward substitution solves T x = b.
        std::vector<double> x = {1.0, 2.0};
        solve_lower(l, x);
        solve_upper(l, x);
        const std::vector<double> back = t.mul(x);
        CHECK(back[0] == doctest::Approx(1.0));
        CHECK(back[1] == doctest::Approx(2.0));
    }
    SUBCASE("singular and indefinite matrices are rejected") {
        const SymTridiagonal singular = make_tridiag({1.0, 1.0}, {1.0});
        BidiagCholesky l;
        CHECK_FALSE(try_cholesky_shifted(singular, 0.0, l));
        CHECK(try_cholesky_shifted(singular, 1.0, l));

        const SymTridiagonal negative = make_tridiag({-1.0}, {});
        CHECK_FALSE(try_cholesky_shifted(negative, 0.0, l));
        CHECK_THROWS_AS(try_cholesky_shifted(SymTridiagonal{}, 0.0, l), glme::ValueError);
    }
}

TEST_CASE("subproblem: interior minimizer") {
    const SymTridiagonal t = make_tridiag({2.0}, {});
    const TrsResult r = trs_solve(t, 1.0, 1.0);
    CHECK(r.h[0] == doctest::Approx(-0.5));
    CHECK(r.lambda == 0.0);
    CHECK_FALSE(r.boundary);
    CHECK_FALSE(r.hard_case);
    CHECK(r.objective == doctest::Approx(-0.25));
}

TEST_CASE("subproblem: boundary minimizer, frozen multiplier") {
    const SymTridiagonal t = make_tridiag({2.0}, {});
    const TrsResult r = trs_solve(t, 1.0, 0.25);
    CHECK(r.boundary);
    CHECK(r.lambda == doctest::Approx(2.0));
    CHECK(r.h[0] == doctest::Approx(-0.25));
    CHECK(r.objective == doctest::Approx(-0.1875));
    CHECK(norm2(r.h) <= 0.25 * (1.0 + 1e-12));
    CHECK(r.newton_iters <= 25);
}

TEST_CASE("subproblem: boundary minimizer on a diagonal matrix") {
    const SymTridiagonal t = make_tridiag({2.0, 4.0}, {0.0});
    const TrsResult r = trs_solve(t, 1.0, 0.1);
    CHECK(r.boundary);
    CHECK(r.lambda == doctest::Approx(8.0));
    CHECK(r.h[0] == doctest::Approx(-0.1));
    CHECK(r.h[1] == doctest::Approx(0.0));
    CHECK(stationarity(t, 1.0, r) <= 1e-10);
}

TEST_CASE("subproblem: indefinite matrix forces a positive multiplier") {
    const SymTridiagonal t = make_tridiag({-2.0}, {});
    const TrsResult r = trs_solve(t, 1.0, 1.0);
    CHECK(r.boundary);
    CHECK(r.lambda == doctest::Approx(3.0));
    CHECK(r.h[0] == doctest::Approx(-1.0));
    CHECK(r.newton_iters <= 25);
}

TEST_CASE("subproblem: degenerate gradient direction") {
    // The gradient has no component along the smallest eigenvector, so the
    // minimizer needs an explicit eigenvector contribution.
    const SymTridiagonal t = make_tridiag({3.0, -1.0}, {0.0});
    const TrsResult r = trs_solve(t, 1.0, 1.0);
    CHECK(r.boundary);
    CHECK(r.hard_case);
    CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm2(r.h) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.h[0] == doctest::Approx(-0.25).epsilon(1e-6));
    CHECK(std::abs(r.h[1]) == doctest::Approx(std::sqrt(15.0) / 4.0).epsilon(1e-6));
    CHECK(r.objective == doctest::Approx(-0.625).epsilon(1e-8));
}

TEST_CASE("subproblem: zero gradient with positive definite matrix") {
    const SymTridiagonal t = make_tridiag({2.0, 3.0}, {0.5});
    const TrsResult r = trs_solve(t, 0.0, 1.0);
    CHECK(norm2(r.h) == 0.0);
    CHECK(r.lambda == 0.0);
    CHECK_FALSE(r.boundary);
}

TEST_CASE("subproblem: optimality conditions across radii") {
    const SymTridiagonal t = make_tridiag({2.0, 1.0, 3.0}, {0.5, -0.25});
    const double gamma0 = 1.0;
    for (double delta : {0.01, 0.1, 0.5, 1.0, 5.0}) {
        CAPTURE(delta);
        const TrsResult r = trs_solve(t, gamma0, delta);
        CHECK(r.lambda >= 0.0);
        CHECK(norm2(r.h) <= delta * (1.0 + 1e-12));
        CHECK(stationarity(t, gamma0, r) <= 1e-9 * (1.0 + r.lambda));
        CHECK(std::abs(r.lambda * (norm2(r.h) - delta)) <= 1e-9 * (1.0 + delta));
    }
}

TEST_CASE("subproblem: multiplier grows as the radius shrinks") {
    const SymTridiagonal t = make_tridiag({2.0, 1.0, 3.0}, {0.5, -0.25});
    double prev_lambda = -1.0;
    for (double delta : {0.5, 0.2, 0.1, 0.05, 0.01}) {
        const TrsResult r = trs_solve(t, 1.0, delta);
        CHECK(r.lambda > prev_lambda);
        prev_lambda = r.lambda;
    }
}

TEST_CASE("subproblem: warm start reproduces the cold-start multiplier") {
    const SymTridiagonal t = make_tridiag({2.0, 1.0, 3.0}, {0.5, -0.25});
    const TrsResult cold = trs_solve(t, 1.0, 0.05);
    TrsOptions warm_opts;
    warm_opts.lambda_warm_start = cold.lambda;
    const TrsResult warm = trs_solve(t, 1.0, 0.05, warm_opts);
    CHECK(warm.lambda == doctest::Approx(cold.lambda).epsilon(1e-10));
    CHECK(warm.newton_iters <= cold.newton_iters);
    CHECK(warm.lambda_history.size() <= warm.newton_iters);
}

TEST_CASE("subproblem: parameter validation and iteration cap") {
    const SymTridiagonal t = make_tridiag({2.0}, {});
    CHECK_THROWS_AS(trs_solve(t, 1.0, 0.0), glme::ValueError);
    CHECK_THROWS_AS(trs_solve(t, -1.0, 1.0), glme::ValueError);
    CHECK_THROWS_AS(trs_solve(SymTridiagonal{}, 1.0, 1.0), glme::ValueError);

    TrsOptions opts;
    opts.max_iter = 0;
    CHECK_THROWS_AS(trs_solve(t, 1.0, 0.25, opts), glme::ConvergenceError);
}
