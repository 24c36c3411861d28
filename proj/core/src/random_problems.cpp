#include "glme/random_problems.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "glme/errors.hpp"
#include "glme/structured_factor.hpp"

namespace glme {

namespace {

constexpr double kTwoPow53 = 9007199254740992.0;  // 2^53
constexpr double kPi = 3.14159265358979323846;

}  // namespace

double RandomStream::uniform01() {
    return static_cast<double>(eng_() >> 11) / kTwoPow53;
}

double RandomStream::uniform() { return 2.0 * uniform01() - 1.0; }

double RandomStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

double RandomStream::integer(long lo, long hi) {
    if (hi < lo) throw ValueError("RandomStream::integer: hi < lo");
    const double span = static_cast<double>(hi - lo + 1);
    double k = std::floor(uniform01() * span);
    if (k >= span) k = span - 1.0;
    return static_cast<double>(lo) + k;
}

DenseMatrix random_dense(RandomStream& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.uniform();
    }
    return a;
}

DenseMatrix random_integer_dense(RandomStream& rng, std::size_t rows, std::size_t cols,
                                 long lo, long hi) {
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.integer(lo, hi);
    }
    return a;
}

DenseMatrix random_orthogonal(RandomStream& rng, std::size_t n) {
    DenseMatrix q = random_dense(rng, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * q(i, j);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        if (norm <= 1e-10) {
            throw NumericalError("random_orthogonal: Gram-Schmidt pivot collapsed");
        }
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
    }
    return q;
}

SparseMatrix random_sparse(RandomStream& rng, std::size_t rows, std::size_t cols,
                           double density) {
    if (!(density > 0.0) || density > 1.0) {
        throw ValueError("random_sparse: density must lie in (0, 1]");
    }
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(density * static_cast<double>(rows * cols)) + 8);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (rng.uniform01() < density) entries.push_back({i, j, rng.uniform()});
        }
    }
    if (entries.empty()) entries.push_back({0, 0, 1.0});
    return SparseMatrix(rows, cols, std::move(entries));
}

namespace {

EquationSpec random_spec(Family family, std::size_t m, std::size_t n, RandomStream& rng) {
    auto d = [&](std::size_t r, std::size_t c) {
        return StructuredFactor::dense(random_dense(rng, r, c));
    };
    switch (family) {
        case Family::AXB:
            return EquationSpec::axb(d(m, m), d(n, n));
        case Family::ClassicalSylvester:
            return EquationSpec::classical_sylvester(d(m, m), d(n, n));
        case Family::GeneralizedSylvester:
            return EquationSpec::generalized_sylvester(d(m, m), d(n, n), d(m, m), d(n, n));
        case Family::Stein:
            return EquationSpec::stein(d(m, m), d(n, n));
        case Family::TClassical:
            return EquationSpec::t_classical(d(n, m), d(m, n));
        case Family::TGeneralized:
            return EquationSpec::t_generalized(d(m, m), d(n, n), d(m, n), d(m, n));
        case Family::TStein:
            return EquationSpec::t_stein(d(n, m), d(n, m));
        case Family::LyapunovDiscrete:
            if (m != n) throw ValueError("random_instance: Lyapunov families need m == n");
            return EquationSpec::lyapunov_discrete(d(m, m));
        case Family::LyapunovContinuous:
            if (m != n) throw ValueError("random_instance: Lyapunov families need m == n");
            return EquationSpec::lyapunov_continuous(d(m, m));
        case Family::StructuredSylvester: {
            std::vector<double> first_column(n);
            for (double& v : first_column) v = rng.uniform();
            return EquationSpec::structured_sylvester(
                d(m, m), StructuredFactor::circulant(std::move(first_column)));
        }
        case Family::Custom:
            break;
    }
    throw ValueError("random_instance: no generation recipe for this family");
}

}  // namespace

GeneratedProblem random_instance(Family family, std::size_t m, std::size_t n,
                                 std::uint64_t seed, bool consistent) {
    RandomStream rng(seed);
    EquationSpec spec = random_spec(family, m, n, rng);
    if (consistent) {
        DenseMatrix x_true = random_dense(rng, m, n);
        DenseMatrix e = spec.apply_f(x_true);
        return {std::move(spec), std::move(x_true), std::move(e)};
    }
    DenseMatrix e = random_dense(rng, spec.p(), spec.q());
    return {std::move(spec), DenseMatrix(), std::move(e)};
}

GeneratedProblem recovery_instance(std::size_t size, std::uint64_t seed) {
    RandomStream rng(seed);
    auto d = [&] { return StructuredFactor::dense(random_dense(rng, size, size)); };
    EquationSpec spec = EquationSpec::generalized_sylvester(d(), d(), d(), d());
    DenseMatrix x_true = random_integer_dense(rng, size, size, -9, 9);
    DenseMatrix e = spec.apply_f(x_true);
    return {std::move(spec), std::move(x_true), std::move(e)};
}

GeneratedProblem inconsistent_sylvester(std::size_t size, std::uint64_t seed) {
    if (size < 2) throw ValueError("inconsistent_sylvester: size must be at least 2");
    RandomStream rng(seed);

    // Upper-triangular cores expose their eigenvalues on the diagonal; pinning
    // d_0 = -a_0 plants the shared eigenvalue that makes X -> A X + X D
    // singular.  Orthogonal conjugation then hides the triangular structure
    // without moving the spectra.
    DenseMatrix ua(size, size);
    DenseMatrix ud(size, size);
    for (std::size_t i = 0; i < size; ++i) {
        ua(i, i) = 0.5 + 2.0 * rng.uniform01();
        ud(i, i) = 0.5 + 2.0 * rng.uniform01();
        for (std::size_t j = i + 1; j < size; ++j) {
            ua(i, j) = rng.uniform();
            ud(i, j) = rng.uniform();
        }
    }
    ud(0, 0) = -ua(0, 0);

    const DenseMatrix qa = random_orthogonal(rng, size);
    const DenseMatrix qd = random_orthogonal(rng, size);
    const DenseMatrix a = qa * ua * transpose(qa);
    const DenseMatrix d = qd * ud * transpose(qd);

    EquationSpec spec = EquationSpec::classical_sylvester(StructuredFactor::dense(a),
                                                          StructuredFactor::dense(d));
    DenseMatrix e = random_dense(rng, size, size);
    return {std::move(spec), DenseMatrix(), std::move(e)};
}

SparseModePair sparse_mode_instance(std::size_t m, std::size_t n, double density,
                                    std::uint64_t seed) {
    RandomStream rng(seed);

    // Diagonal shifts push both spectra well into the right half plane, so the
    // eigenvalue sums of the two-sided map stay bounded away from zero and the
    // sparse/dense twins converge to the same solution.
    DenseMatrix a = random_dense(rng, m, m);
    for (std::size_t i = 0; i < m; ++i) a(i, i) += 3.0;

    const SparseMatrix raw = random_sparse(rng, n, n, density);
    std::vector<Triplet> shifted = raw.triplets();
    for (std::size_t i = 0; i < n; ++i) shifted.push_back({i, i, 5.0});
    SparseMatrix d_sparse(n, n, std::move(shifted));

    DenseMatrix e = random_dense(rng, m, n);
    EquationSpec sparse_spec = EquationSpec::classical_sylvester(
        StructuredFactor::dense(a), StructuredFactor::sparse(d_sparse));
    EquationSpec dense_spec = EquationSpec::classical_sylvester(
        StructuredFactor::dense(a), StructuredFactor::dense(d_sparse.to_dense()));
    return {std::move(sparse_spec), std::move(dense_spec), std::move(e),
            d_sparse.density()};
}

}  // namespace glme
