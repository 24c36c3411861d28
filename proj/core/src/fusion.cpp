#include "glme/fusion.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <utility>

#include "glme/equation.hpp"
#include "glme/errors.hpp"
#include "glme/random_problems.hpp"

namespace glme {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
    Eigen::MatrixXd out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    }
    return out;
}

DenseMatrix from_eigen(const Eigen::MatrixXd& a) {
    DenseMatrix out(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = a(i, j);
        }
    }
    return out;
}

void add_noise(DenseMatrix& a, double variance, RandomStream& rng) {
    if (variance == 0.0) return;
    if (variance < 0.0) throw ValueError("degrade: noise variance must be nonnegative");
    const double sigma = std::sqrt(variance);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += sigma * rng.normal();
    }
}

}  // namespace

StructuredFactor make_cyclic_blur(std::size_t height, std::size_t width,
                                  const std::vector<std::vector<double>>& kernel) {
    const std::size_t pixels = height * width;
    if (pixels == 0) throw ValueError("make_cyclic_blur: empty grid");
    const std::size_t k = kernel.size();
    if (k == 0 || k % 2 == 0 || k > std::min(height, width)) {
        throw ValueError("make_cyclic_blur: kernel must be odd-sized and fit the grid");
    }
    double sum = 0.0;
    for (const auto& row : kernel) {
        if (row.size() != k) throw ValueError("make_cyclic_blur: kernel must be square");
        for (double v : row) sum += v;
    }
    if (sum == 0.0) throw ValueError("make_cyclic_blur: kernel sum must be nonzero");

    const long half = static_cast<long>(k / 2);
    std::vector<double> first_column(pixels, 0.0);
    for (long dy = -half; dy <= half; ++dy) {
        for (long dx = -half; dx <= half; ++dx) {
            const double w =
                kernel[static_cast<std::size_t>(dy + half)][static_cast<std::size_t>(dx + half)] /
                sum;
            const long off = dy * static_cast<long>(width) + dx;
            const long wrapped =
                ((off % static_cast<long>(pixels)) + static_cast<long>(pixels)) %
                static_cast<long>(pixels);
            first_column[static_cast<std::size_t>(wrapped)] += w;
        }
    }
    return StructuredFactor::circulant(std::move(first_column));
}

DegradationModel identity_model(std::size_t bands, std::size_t height, std::size_t width) {
    if (bands == 0 || height == 0 || width == 0) {
        throw ValueError("identity_model: geometry must be positive");
    }
    DegradationModel model;
    model.height = height;
    model.width = width;
    model.l_spec = DenseMatrix::identity(bands);
    model.blur = StructuredFactor::identity(height * width);
    model.downsample = StructuredFactor::identity(height * width);
    return model;
}

DegradationModel desk_model(std::size_t bands, std::size_t l_rows, std::size_t height,
                            std::size_t width, std::size_t stride, std::uint64_t seed) {
    if (bands == 0 || l_rows == 0 || height == 0 || width == 0 || stride == 0) {
        throw ValueError("desk_model: geometry must be positive");
    }
    if (height % stride != 0 || width % stride != 0) {
        throw ValueError("desk_model: stride must divide both grid axes");
    }
    RandomStream rng(seed);
    DegradationModel model;
    model.height = height;
    model.width = width;

    // Nonnegative rows normalized to sum 1: each output channel is a convex
    // mixture of the input bands.
    model.l_spec = DenseMatrix(l_rows, bands);
    for (std::size_t i = 0; i < l_rows; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < bands; ++j) {
            const double u = rng.uniform01();
            model.l_spec(i, j) = u * u;
            sum += model.l_spec(i, j);
        }
        for (std::size_t j = 0; j < bands; ++j) model.l_spec(i, j) /= sum;
    }

    model.blur = make_cyclic_blur(height, width,
                                  {{1.0, 2.0, 1.0}, {2.0, 4.0, 2.0}, {1.0, 2.0, 1.0}});
    model.downsample = StructuredFactor::downsampler_grid(height, width, stride);
    return model;
}

std::pair<DenseMatrix, DenseMatrix> degrade(const ImageStack& stack,
                                            const DegradationModel& model) {
    validate_image_stack(stack);
    if (stack.height != model.height || stack.width != model.width) {
        throw DimensionError("degrade: stack grid does not match the model");
    }
    if (model.l_spec.cols() != stack.bands) {
        throw DimensionError("degrade: spectral response expects a different band count");
    }
    if (model.blur.rows() != stack.pixels() || model.downsample.rows() != stack.pixels()) {
        throw DimensionError("degrade: spatial operators expect a different pixel count");
    }

    RandomStream rng(model.noise_seed);
    DenseMatrix y_m = model.l_spec * stack.data;
    add_noise(y_m, model.noise_m_variance, rng);
    DenseMatrix y_h = model.downsample.apply_right(model.blur.apply_right(stack.data));
    add_noise(y_h, model.noise_h_variance, rng);
    return {std::move(y_m), std::move(y_h)};
}

FusionProblem build_fusion_problem(const DenseMatrix& y_m, const DenseMatrix& y_h,
                                   const DegradationModel& model, std::size_t r) {
    const std::size_t bands = model.l_spec.cols();
    if (r == 0 || r > bands) {
        throw ValueError("build_fusion_problem: subspace dimension must lie in [1, bands]");
    }
    if (y_h.rows() != bands) {
        throw DimensionError("build_fusion_problem: y_h band count does not match the model");
    }
    if (y_m.rows() != model.l_spec.rows()) {
        throw DimensionError("build_fusion_problem: y_m channel count does not match the model");
    }
    if (y_m.cols() != model.height * model.width) {
        throw DimensionError("build_fusion_problem: y_m must live on the full grid");
    }
    if (y_h.cols() != model.downsample.cols()) {
        throw DimensionError("build_fusion_problem: y_h must live on the decimated grid");
    }

    // Principal components of the low-resolution view; column signs pinned so
    // the basis (and everything derived from it) is reproducible.
    const Eigen::MatrixXd yh = to_eigen(y_h);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(yh, Eigen::ComputeThinU);
    Eigen::MatrixXd basis = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        Eigen::Index pivot = 0;
        basis.col(j).cwiseAbs().maxCoeff(&pivot);
        if (basis(pivot, j) < 0.0) basis.col(j) = -basis.col(j);
    }

    const Eigen::MatrixXd gram = basis.transpose() * basis;
    Eigen::FullPivLU<Eigen::MatrixXd> gram_lu(gram);
    gram_lu.setThreshold(1e-12);
    if (gram_lu.rank() < static_cast<Eigen::Index>(r)) {
        throw NumericalError(
            "build_fusion_problem: subspace Gram matrix is rank deficient (ill-posed)");
    }

    const Eigen::MatrixXd lh = to_eigen(model.l_spec) * basis;

    FusionProblem problem;
    problem.height = model.height;
    problem.width = model.width;
    problem.h_basis = from_eigen(basis);
    problem.c1 = from_eigen(gram_lu.solve(lh.transpose() * lh));

    problem.c2 = StructuredFactor::product({model.blur, model.downsample,
                                            model.downsample.transposed(),
                                            model.blur.transposed()});

    // Right-hand side (L H)^T y_m + H^T y_h (B S)^T, premultiplied by the
    // Gram inverse like c1.
    const StructuredFactor bs_t =
        StructuredFactor::product({model.blur, model.downsample}).transposed();
    const DenseMatrix ht_yh = from_eigen(basis.transpose() * yh);
    const DenseMatrix second = bs_t.apply_right(ht_yh);
    const Eigen::MatrixXd rhs = lh.transpose() * to_eigen(y_m) + to_eigen(second);
    problem.c3 = from_eigen(gram_lu.solve(rhs));
    return problem;
}

FusionResult fuse(const FusionProblem& problem, const SolverConfig& cfg) {
    const EquationSpec spec = EquationSpec::structured_sylvester(
        StructuredFactor::dense(problem.c1), problem.c2);
    FusionResult result;
    result.outcome = solve(spec, problem.c3, cfg);

    const DenseMatrix& u = result.outcome.x_star;
    const double u_norm = frob_norm(u);
    result.rel_residual =
        u_norm > 0.0 ? result.outcome.residual / u_norm : result.outcome.residual;

    result.fused.bands = problem.h_basis.rows();
    result.fused.height = problem.height;
    result.fused.width = problem.width;
    result.fused.data = problem.h_basis * u;
    validate_image_stack(result.fused);
    return result;
}

ImageStack synthetic_scene(std::size_t bands, std::size_t height, std::size_t width,
                           std::uint64_t seed) {
    ImageStack stack = make_image_stack(bands, height, width);
    RandomStream rng(seed);
    for (std::size_t b = 0; b < bands; ++b) {
        // Three low-frequency sinusoid components.
        double amp[3], fy[3], fx[3], phase[3];
        for (int c = 0; c < 3; ++c) {
            amp[c] = 0.15 + 0.15 * rng.uniform01();
            fy[c] = rng.integer(1, 3);
            fx[c] = rng.integer(1, 3);
            phase[c] = 2.0 * kPi * rng.uniform01();
        }
        // One piecewise-constant rectangle.
        const std::size_t ry0 = static_cast<std::size_t>(rng.integer(0, static_cast<long>(height / 2)));
        const std::size_t rx0 = static_cast<std::size_t>(rng.integer(0, static_cast<long>(width / 2)));
        const std::size_t ry1 =
            std::min(height, ry0 + 2 + static_cast<std::size_t>(rng.integer(0, static_cast<long>(height / 3))));
        const std::size_t rx1 =
            std::min(width, rx0 + 2 + static_cast<std::size_t>(rng.integer(0, static_cast<long>(width / 3))));
        const double step = 0.2 + 0.3 * rng.uniform01();

        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                double v = 1.0;
                for (int c = 0; c < 3; ++c) {
                    v += amp[c] * std::sin(2.0 * kPi *
                                               (fy[c] * static_cast<double>(y) /
                                                    static_cast<double>(height) +
                                                fx[c] * static_cast<double>(x) /
                                                    static_cast<double>(width)) +
                                           phase[c]);
                }
                if (y >= ry0 && y < ry1 && x >= rx0 && x < rx1) v += step;
                stack.at(b, y, x) = v;
            }
        }
    }
    return stack;
}

}  // namespace glme
