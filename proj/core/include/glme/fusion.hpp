#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "glme/dense_matrix.hpp"
#include "glme/gltr.hpp"
#include "glme/image_stack.hpp"
#include "glme/structured_factor.hpp"

namespace glme {

/// Observation model producing two degraded views of a bands x pixels stack X:
///   y_m = l_spec * X                 (spectral mixing, keeps the full grid)
///   y_h = X * blur * downsample      (per-band cyclic blur, then grid decimation)
/// Optional additive Gaussian noise (given variance, seeded) on each view.
struct DegradationModel {
    std::size_t height = 0;  ///< grid geometry of the stacks this model degrades
    std::size_t width = 0;
    DenseMatrix l_spec;  ///< few x bands spectral response
    /// pixels x pixels circulant convolution
    StructuredFactor blur = StructuredFactor::identity(1);
    /// pixels x kept selection with S^T S = I
    StructuredFactor downsample = StructuredFactor::identity(1);
    double noise_m_variance = 0.0;
    double noise_h_variance = 0.0;
    std::uint64_t noise_seed = 0;
};

/// Circulant cyclic convolution over the flattened row-major pixel ordering.
/// `kernel` is an odd-sized square of taps centered on the pixel; it is
/// normalized to sum 1 so the blur preserves constant bands.  Taps are placed
/// at flattened offsets (dy*width + dx) mod (height*width).
StructuredFactor make_cyclic_blur(std::size_t height, std::size_t width,
                                  const std::vector<std::vector<double>>& kernel);

/// Pass-through model: l_spec = I, identity blur, unit downsample, no noise.
DegradationModel identity_model(std::size_t bands, std::size_t height, std::size_t width);

/// Desk-scale default: seeded nonnegative row-normalized l_rows x bands
/// spectral response, a normalized near-Gaussian 3x3 cyclic blur, and
/// stride-decimation of the grid.
DegradationModel desk_model(std::size_t bands, std::size_t l_rows, std::size_t height,
                            std::size_t width, std::size_t stride, std::uint64_t seed);

/// Applies the model: returns (y_m, y_h).  Throws DimensionError when the
/// stack does not match the model geometry.
std::pair<DenseMatrix, DenseMatrix> degrade(const ImageStack& stack,
                                            const DegradationModel& model);

/// The subspace-reduced two-sided equation c1 * U + U * c2 = c3 recovered
/// from the degraded views, with the unknown U of shape r x pixels and the
/// full-grid estimate h_basis * U.
struct FusionProblem {
    std::size_t height = 0;
    std::size_t width = 0;
    DenseMatrix c1;  ///< r x r
    /// pixels x pixels, (blur*downsample)(blur*downsample)^T, never materialized
    StructuredFactor c2 = StructuredFactor::identity(1);
    DenseMatrix c3;      ///< r x pixels
    DenseMatrix h_basis; ///< bands x r subspace basis (orthonormal columns)
};

/// Builds the reduced equation.  The basis is the top-r left singular vectors
/// of y_h (principal components of the low-resolution view); both reduced
/// coefficient blocks are premultiplied by the inverse of the basis Gram
/// matrix.  Throws ValueError when r exceeds the band count and
/// NumericalError when the Gram matrix is rank deficient (ill-posed).
FusionProblem build_fusion_problem(const DenseMatrix& y_m, const DenseMatrix& y_h,
                                   const DegradationModel& model, std::size_t r);

struct FusionResult {
    ImageStack fused;        ///< h_basis * U_star reshaped onto the grid
    SolveOutcome outcome;    ///< solver diagnostics for the reduced equation
    double rel_residual = 0.0;  ///< ||c1 U + U c2 - c3|| / ||U||
};

/// Solves the reduced equation with the two-sided solver and lifts the
/// result back to a full stack.
FusionResult fuse(const FusionProblem& problem, const SolverConfig& cfg = {});

/// Seeded synthetic reference: per band, a sum of low-frequency sinusoids
/// plus one piecewise-constant rectangle, offset to keep band means positive.
ImageStack synthetic_scene(std::size_t bands, std::size_t height, std::size_t width,
                           std::uint64_t seed);

}  // namespace glme
