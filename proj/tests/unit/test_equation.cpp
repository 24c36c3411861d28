#include <doctest.h>

#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"
#include "glme/errors.hpp"
#include "glme/structured_factor.hpp"
#include "test_util.hpp"

using glme::DenseMatrix;
using glme::EquationSpec;
using glme::Family;
using glme::StructuredFactor;
using glme_test::fill;

namespace {

/// <f(X), Y> must equal <X, f*(Y)> for the adjoint to be correct.
void check_adjoint(const EquationSpec& spec) {
    const DenseMatrix x = fill(spec.m(), spec.n(), 101);
    const DenseMatrix y = fill(spec.p(), spec.q(), 202);
    const double lhs = glme::frob_inner(spec.apply_f(x), y);
    const double rhs = glme::frob_inner(x, spec.apply_fstar(y));
    const double scale = glme::frob_norm(x) * glme::frob_norm(y) + 1.0;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
}

}  // namespace

TEST_CASE("family names round trip") {
    const Family all[] = {Family::Custom,
                          Family::AXB,
                          Family::ClassicalSylvester,
                          Family::GeneralizedSylvester,
                          Family::Stein,
                          Family::TClassical,
                          Family::TGeneralized,
                          Family::TStein,
                          Family::LyapunovDiscrete,
                          Family::LyapunovContinuous,
                          Family::StructuredSylvester};
    for (Family f : all) {
        CHECK(glme::family_from_name(glme::family_name(f)) == f);
    }
    CHECK_THROWS_AS(glme::family_from_name("watermelon"), glme::ValueError);
}

TEST_CASE("single-product equation") {
    const DenseMatrix a = fill(3, 2, 1);
    const DenseMatrix b = fill(4, 5, 2);
    const EquationSpec spec =
        EquationSpec::axb(StructuredFactor::dense(a), StructuredFactor::dense(b));
    CHECK(spec.family() == Family::AXB);
    CHECK(spec.m() == 2);
    CHECK(spec.n() == 4);
    CHECK(spec.p() == 3);
    CHECK(spec.q() == 5);

    const DenseMatrix x = fill(2, 4, 3);
    CHECK(glme::max_abs_diff(spec.apply_f(x), a * x * b) <= 1e-13);
    check_adjoint(spec);

    CHECK_THROWS_AS(spec.apply_f(fill(4, 2, 4)), glme::DimensionError);
    CHECK_THROWS_AS(spec.apply_fstar(fill(5, 3, 5)), glme::DimensionError);
}

TEST_CASE("two-sided shift equation") {
    const DenseMatrix a = fill(3, 3, 6);
    const DenseMatrix d = fill(2, 2, 7);
    const EquationSpec spec = EquationSpec::classical_sylvester(StructuredFactor::dense(a),
                                                                StructuredFactor::dense(d));
    CHECK(spec.family() == Family::ClassicalSylvester);
    const DenseMatrix x = fill(3, 2, 8);
    CHECK(glme::max_abs_diff(spec.apply_f(x), a * x + x * d) <= 1e-13);
    check_adjoint(spec);

    CHECK_THROWS_AS(EquationSpec::classical_sylvester(StructuredFactor::dense(fill(3, 2, 9)),
                                                      StructuredFactor::dense(d)),
                    glme::DimensionError);
}

TEST_CASE("two-term equation") {
    const DenseMatrix a = fill(3, 2, 10);
    const DenseMatrix b = fill(4, 5, 11);
    const DenseMatrix c = fill(3, 2, 12);
    const DenseMatrix d = fill(4, 5, 13);
    const EquationSpec spec = EquationSpec::generalized_sylvester(
        StructuredFactor::dense(a), StructuredFactor::dense(b), StructuredFactor::dense(c),
        StructuredFactor::dense(d));
    const DenseMatrix x = fill(2, 4, 14);
    CHECK(glme::max_abs_diff(spec.apply_f(x), a * x * b + c * x * d) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("product-plus-identity equation") {
    const DenseMatrix a = fill(3, 3, 15);
    const DenseMatrix b = fill(2, 2, 16);
    const EquationSpec spec =
        EquationSpec::stein(StructuredFactor::dense(a), StructuredFactor::dense(b));
    const DenseMatrix x = fill(3, 2, 17);
    DenseMatrix expect = a * x * b;
    glme::add_scaled(expect, 1.0, x);
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("transpose-coupled shift equation") {
    const DenseMatrix a = fill(4, 2, 18);  // n x m
    const DenseMatrix d = fill(2, 4, 19);  // m x n
    const EquationSpec spec =
        EquationSpec::t_classical(StructuredFactor::dense(a), StructuredFactor::dense(d));
    CHECK(spec.m() == 2);
    CHECK(spec.n() == 4);
    CHECK(spec.p() == 4);
    CHECK(spec.q() == 4);
    const DenseMatrix x = fill(2, 4, 20);
    DenseMatrix expect = a * x;
    glme::add_scaled(expect, 1.0, glme::transpose(x) * d);
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("transpose-coupled two-term equation") {
    const DenseMatrix a = fill(3, 2, 21);
    const DenseMatrix b = fill(4, 5, 22);
    const DenseMatrix c = fill(3, 4, 23);
    const DenseMatrix d = fill(2, 5, 24);
    const EquationSpec spec = EquationSpec::t_generalized(
        StructuredFactor::dense(a), StructuredFactor::dense(b), StructuredFactor::dense(c),
        StructuredFactor::dense(d));
    const DenseMatrix x = fill(2, 4, 25);
    DenseMatrix expect = a * x * b;
    glme::add_scaled(expect, 1.0, c * glme::transpose(x) * d);
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("transpose-plus-product equation") {
    const DenseMatrix a = fill(4, 2, 26);  // n x m
    const DenseMatrix b = fill(4, 2, 27);  // n x m
    const EquationSpec spec =
        EquationSpec::t_stein(StructuredFactor::dense(a), StructuredFactor::dense(b));
    CHECK(spec.p() == 4);
    CHECK(spec.q() == 2);
    const DenseMatrix x = fill(2, 4, 28);
    DenseMatrix expect = a * x * b;
    glme::add_scaled(expect, 1.0, glme::transpose(x));
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("congruence-minus-identity equation") {
    const DenseMatrix a = fill(3, 3, 29);
    const EquationSpec spec = EquationSpec::lyapunov_discrete(StructuredFactor::dense(a));
    const DenseMatrix x = fill(3, 3, 30);
    DenseMatrix expect = a * x * glme::transpose(a);
    glme::add_scaled(expect, -1.0, x);
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("symmetric shift equation") {
    const DenseMatrix a = fill(3, 3, 31);
    const EquationSpec spec = EquationSpec::lyapunov_continuous(StructuredFactor::dense(a));
    const DenseMatrix x = fill(3, 3, 32);
    DenseMatrix expect = a * x;
    glme::add_scaled(expect, 1.0, x * glme::transpose(a));
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-13);
    check_adjoint(spec);
}

TEST_CASE("structured right-coefficient equation") {
    const DenseMatrix a = fill(3, 3, 33);
    const StructuredFactor d = StructuredFactor::circulant({1.0, 0.25, 0.0, -0.5});
    const EquationSpec spec =
        EquationSpec::structured_sylvester(StructuredFactor::dense(a), d);
    CHECK(spec.family() == Family::StructuredSylvester);
    const DenseMatrix x = fill(3, 4, 34);
    DenseMatrix expect = a * x;
    glme::add_scaled(expect, 1.0, x * d.densify());
    CHECK(glme::max_abs_diff(spec.apply_f(x), expect) <= 1e-12);
    check_adjoint(spec);
}

TEST_CASE("term lists validate shapes") {
    std::vector<glme::TermPair> linear;
    linear.push_back({StructuredFactor::dense(fill(3, 2, 35)),
                      StructuredFactor::dense(fill(4, 5, 36))});
    std::vector<glme::TermPair> bad = linear;
    bad.push_back({StructuredFactor::dense(fill(3, 3, 37)),
                   StructuredFactor::dense(fill(4, 5, 38))});
    CHECK_THROWS_AS(EquationSpec(2, 4, bad, {}), glme::DimensionError);
    CHECK_THROWS_AS(EquationSpec(2, 4, {}, {}), glme::DimensionError);
    const EquationSpec ok(2, 4, linear, {});
    CHECK(ok.family() == Family::Custom);
    CHECK_FALSE(ok.has_transposed_terms());
}
