#pragma once

#include <cstdint>
#include <random>

#include "glme/dense_matrix.hpp"
#include "glme/equation.hpp"
#include "glme/sparse_matrix.hpp"

namespace glme {

/// Deterministic scalar stream over std::mt19937_64 with fixed bit-level
/// mappings to doubles.  The engine itself is fully specified by the
/// standard, but the distribution templates in <random> are
/// implementation-defined, so the mappings are done here to keep
/// seed -> draws reproducible across toolchains.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    /// Uniform in [0, 1), 53 significant bits.
    double uniform01();
    /// Uniform in [-1, 1).
    double uniform();
    /// Standard normal via the Box-Muller transform (pairwise, cached spare).
    double normal();
    /// Uniform integer-valued double in [lo, hi] inclusive.
    double integer(long lo, long hi);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// rows x cols with independent uniform [-1, 1) entries.
DenseMatrix random_dense(RandomStream& rng, std::size_t rows, std::size_t cols);

/// rows x cols with independent integer-valued entries in [lo, hi].
DenseMatrix random_integer_dense(RandomStream& rng, std::size_t rows, std::size_t cols,
                                 long lo, long hi);

/// Orthogonal n x n matrix: modified Gram-Schmidt applied to a random square
/// matrix.  Throws NumericalError if a pivot collapses (never for healthy rngs).
DenseMatrix random_orthogonal(RandomStream& rng, std::size_t n);

/// Sparse rows x cols matrix where each coordinate is occupied independently
/// with probability `density`, values uniform in [-1, 1).  Guaranteed
/// non-empty (a unit (0,0) entry is inserted if every draw missed).
SparseMatrix random_sparse(RandomStream& rng, std::size_t rows, std::size_t cols,
                           double density);

/// A generated equation instance.  When the right-hand side was constructed
/// as e = f(x_true), x_true holds that solution; otherwise x_true is the
/// empty placeholder and e is an independent random right-hand side.
struct GeneratedProblem {
    EquationSpec spec;
    DenseMatrix x_true;
    DenseMatrix e;
};

/// Random instance of `family` with unknown of shape m x n and dense
/// coefficient factors (the structured-coefficient family draws a random
/// circulant).  `consistent` selects e = f(x_true) versus an independent
/// random e.  The two square Lyapunov families require m == n.
GeneratedProblem random_instance(Family family, std::size_t m, std::size_t n,
                                 std::uint64_t seed, bool consistent);

/// Construct-and-recover instance: size x size two-term equation
/// A X B + C X D = E with integer-valued x_true (entries in [-9, 9]) and
/// e = f(x_true).
GeneratedProblem recovery_instance(std::size_t size, std::uint64_t seed);

/// Singular-and-inconsistent two-sided instance A X + X D = E: A and -D are
/// built with a shared eigenvalue (making the map singular) and conjugated by
/// random orthogonal matrices; E is an independent random right-hand side,
/// which a singular map almost surely cannot reach.
GeneratedProblem inconsistent_sylvester(std::size_t size, std::uint64_t seed);

/// The same two-sided problem A X + X D = E expressed twice: once with the
/// right coefficient D held sparse, once densified.  Both maps are identical
/// mathematically; diagonal shifts keep the instance well conditioned.
struct SparseModePair {
    EquationSpec sparse_spec;
    EquationSpec dense_spec;
    DenseMatrix e;
    double density = 0.0;  ///< realized density of the sparse coefficient
};
SparseModePair sparse_mode_instance(std::size_t m, std::size_t n, double density,
                                    std::uint64_t seed);

}  // namespace glme
