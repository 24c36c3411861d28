#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/sparse_matrix.hpp"

namespace glme {

/// Payload kind of a StructuredFactor.
enum class FactorKind {
    Identity,     ///< scale * I_n, held symbolically
    Dense,        ///< dense matrix
    Sparse,       ///< canonical coordinate sparse matrix
    Diagonal,     ///< diagonal matrix from a vector
    Circulant,    ///< circulant matrix from its first column, applied via FFT
    Downsampler,  ///< full_dim x kept selection matrix S with S^T S = I
    Product,      ///< left-to-right product of factors
};

/// One coefficient factor of a matrix equation term, with structure-aware
/// multiply-by and multiply-by-transpose.  Immutable and cheaply copyable
/// (shared payload); transposition is a flag, not a data transform.
class StructuredFactor {
public:
    /// scale * I_n (symbolic; never materialized by the apply paths).
    static StructuredFactor identity(std::size_t n, double scale = 1.0);
    static StructuredFactor dense(DenseMatrix a);
    static StructuredFactor sparse(SparseMatrix a);
    static StructuredFactor diagonal(std::vector<double> d);

    /// Circulant matrix C with C(i,j) = c[(i-j) mod n] for the given first
    /// column c.  Applies run through a real-input FFT of length n.
    static StructuredFactor circulant(std::vector<double> first_column);

    /// Selection matrix S of shape full_dim x kept.size() with
    /// S(kept[j], j) = 1.  Indices must be strictly increasing and < full_dim;
    /// S^T S = I holds by construction.
    static StructuredFactor downsampler(std::size_t full_dim, std::vector<std::size_t> kept);

    /// Downsampler keeping every stride-th index of each axis of a
    /// height x width grid, flattened row-major (pixel = y*width + x).
    static StructuredFactor downsampler_grid(std::size_t height, std::size_t width,
                                             std::size_t stride);

    /// Product chain[0] * chain[1] * ... * chain.back().
    static StructuredFactor product(std::vector<StructuredFactor> chain);

    /// The transpose of this factor (flag flip; payload is shared).
    StructuredFactor transposed() const;

    FactorKind kind() const noexcept;
    bool is_transposed() const noexcept { return transpose_; }
    /// True for an Identity payload with scale exactly 1.
    bool is_unit_identity() const noexcept;

    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept;

    /// this * x.
    DenseMatrix apply_left(const DenseMatrix& x) const;
    /// x * this.
    DenseMatrix apply_right(const DenseMatrix& x) const;

    /// Dense materialization (for oracles and validation).
    DenseMatrix densify() const;

    // Narrow payload accessors for serialization; each throws ValueError when
    // the kind does not match.
    double identity_scale() const;
    const DenseMatrix& dense_payload() const;
    const SparseMatrix& sparse_payload() const;
    const std::vector<double>& diagonal_payload() const;
    const std::vector<double>& circulant_first_column() const;
    std::size_t downsampler_full_dim() const;
    const std::vector<std::size_t>& downsampler_kept() const;
    const std::vector<StructuredFactor>& product_chain() const;

    class Impl;

private:
    StructuredFactor(std::shared_ptr<const Impl> impl, bool transpose)
        : impl_(std::move(impl)), transpose_(transpose) {}

    std::shared_ptr<const Impl> impl_;
    bool transpose_ = false;
};

}  // namespace glme
