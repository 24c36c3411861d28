#include <doctest.h>

#include <cstdint>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/errors.hpp"
#include "glme/op_count.hpp"
#include "glme/structured_factor.hpp"

using glme::DenseMatrix;
using glme::FactorKind;
using glme::SparseMatrix;
using glme::StructuredFactor;

namespace {

/// Deterministic pseudo-random fill so tests need no RNG module.
DenseMatrix fill(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::vector<double> v(rows * cols);
    std::uint64_t s = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    for (double& x : v) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        x = static_cast<double>(static_cast<std::int64_t>(s >> 11)) / 9.0e18;
    }
    return DenseMatrix(rows, cols, std::move(v));
}

void check_factor_against_dense(const StructuredFactor& f, double tol = 1e-12) {
    const DenseMatrix d = f.densify();
    const DenseMatrix x = fill(f.cols(), 3, 11);
    const DenseMatrix y = fill(4, f.rows(), 22);

    CHECK(glme::max_abs_diff(f.apply_left(x), d * x) <= tol);
    CHECK(glme::max_abs_diff(f.apply_right(y), y * d) <= tol);

    const StructuredFactor ft = f.transposed();
    const DenseMatrix dt = glme::transpose(d);
    const DenseMatrix xt = fill(f.rows(), 3, 33);
    const DenseMatrix yt = fill(4, f.cols(), 44);
    CHECK(glme::max_abs_diff(ft.apply_left(xt), dt * xt) <= tol);
    CHECK(glme::max_abs_diff(ft.apply_right(yt), yt * dt) <= tol);
    CHECK(glme::max_abs_diff(ft.densify(), dt) <= tol);
}

}  // namespace

TEST_CASE("identity factor") {
    const StructuredFactor f = StructuredFactor::identity(3, -2.0);
    CHECK(f.kind() == FactorKind::Identity);
    CHECK(f.identity_scale() == -2.0);
    CHECK_FALSE(f.is_unit_identity());
    CHECK(StructuredFactor::identity(3).is_unit_identity());
    check_factor_against_dense(f);
}

TEST_CASE("dense factor") {
    const StructuredFactor f = StructuredFactor::dense(fill(4, 3, 5));
    CHECK(f.kind() == FactorKind::Dense);
    CHECK(f.rows() == 4);
    CHECK(f.cols() == 3);
    CHECK(f.transposed().rows() == 3);
    check_factor_against_dense(f);
    CHECK_THROWS_AS(f.diagonal_payload(), glme::ValueError);
}

TEST_CASE("sparse factor") {
    const SparseMatrix s(4, 4, {{0, 1, 2.0}, {3, 0, -1.5}, {2, 2, 4.0}});
    const StructuredFactor f = StructuredFactor::sparse(s);
    CHECK(f.kind() == FactorKind::Sparse);
    check_factor_against_dense(f);
}

TEST_CASE("diagonal factor") {
    const StructuredFactor f = StructuredFactor::diagonal({1.0, -2.0, 0.5});
    CHECK(f.kind() == FactorKind::Diagonal);
    check_factor_against_dense(f);
}

TEST_CASE("circulant factor matches its dense form") {
    std::vector<double> c(16);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 / (1.0 + static_cast<double>(i));
    const StructuredFactor f = StructuredFactor::circulant(c);
    CHECK(f.kind() == FactorKind::Circulant);

    const DenseMatrix d = f.densify();
    // first column is c, and each column is a cyclic shift
    CHECK(d(0, 0) == doctest::Approx(c[0]));
    CHECK(d(5, 0) == doctest::Approx(c[5]));
    CHECK(d(0, 1) == doctest::Approx(c[15]));

    const DenseMatrix x = fill(16, 2, 7);
    CHECK(glme::max_abs_diff(f.apply_left(x), d * x) <= 1e-10);
    const DenseMatrix y = fill(2, 16, 8);
    CHECK(glme::max_abs_diff(f.apply_right(y), y * d) <= 1e-10);
    CHECK(glme::max_abs_diff(f.transposed().apply_left(x), glme::transpose(d) * x) <= 1e-10);
}

TEST_CASE("circulant factor of size one is a scalar") {
    const StructuredFactor f = StructuredFactor::circulant({3.0});
    const DenseMatrix x{{2.0}};
    CHECK(f.apply_left(x)(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("downsampler selection and left-inverse property") {
    const StructuredFactor s = StructuredFactor::downsampler(6, {0, 2, 5});
    CHECK(s.kind() == FactorKind::Downsampler);
    CHECK(s.rows() == 6);
    CHECK(s.cols() == 3);
    check_factor_against_dense(s);

    // S^T S = I on the reduced space
    const DenseMatrix i3 = DenseMatrix::identity(3);
    const DenseMatrix sts = s.transposed().apply_left(s.apply_left(i3));
    CHECK(glme::max_abs_diff(sts, i3) == 0.0);

    // selection costs no multiply-adds
    glme::opcount::Scope scope;
    (void)s.apply_left(i3);
    CHECK(scope.count() == 0);

    CHECK_THROWS_AS(StructuredFactor::downsampler(4, {1, 1}), glme::ValueError);
    CHECK_THROWS_AS(StructuredFactor::downsampler(4, {5}), glme::ValueError);
}

TEST_CASE("grid downsampler keeps every stride-th pixel per axis") {
    const StructuredFactor s = StructuredFactor::downsampler_grid(4, 6, 2);
    CHECK(s.rows() == 24);
    CHECK(s.cols() == 6);  // ceil(4/2) * ceil(6/2)
    const auto& kept = s.downsampler_kept();
    CHECK(kept[0] == 0);
    CHECK(kept[1] == 2);
    CHECK(kept[2] == 4);
    CHECK(kept[3] == 12);
}

TEST_CASE("product factor applies children in order") {
    const StructuredFactor a = StructuredFactor::dense(fill(3, 4, 1));
    const StructuredFactor b = StructuredFactor::diagonal({2.0, -1.0, 0.5, 3.0});
    const StructuredFactor c = StructuredFactor::dense(fill(4, 2, 2));
    const StructuredFactor prod = StructuredFactor::product({a, b, c});
    CHECK(prod.kind() == FactorKind::Product);
    CHECK(prod.rows() == 3);
    CHECK(prod.cols() == 2);
    check_factor_against_dense(prod);

    CHECK_THROWS_AS(StructuredFactor::product({c, a}), glme::DimensionError);
    CHECK_THROWS_AS(StructuredFactor::product({}), glme::DimensionError);
}

TEST_CASE("downsampler sandwich is idempotent") {
    // S (S^T S) = S, so applying S, then S^T, then S equals applying S once.
    const StructuredFactor s = StructuredFactor::downsampler(5, {1, 3});
    const DenseMatrix x = fill(2, 3, 9);
    const DenseMatrix once = s.apply_left(x);
    const DenseMatrix thrice = s.apply_left(s.transposed().apply_left(s.apply_left(x)));
    CHECK(glme::max_abs_diff(once, thrice) == 0.0);
}
