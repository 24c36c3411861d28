#include "glme/structured_factor.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <string>
#include <utility>

#include "glme/errors.hpp"
#include "glme/op_count.hpp"

namespace glme {

namespace {

// FFTW plan creation/destruction is not thread safe; executing plans is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

std::size_t ceil_log2(std::size_t n) {
    std::size_t bits = 0;
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
        ++bits;
    }
    return bits;
}

void require_finite_values(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ValueError(std::string(what) + " contains a non-finite value");
        }
    }
}

}  // namespace

class StructuredFactor::Impl {
public:
    virtual ~Impl() = default;

    virtual FactorKind kind() const noexcept = 0;
    virtual std::size_t rows() const noexcept = 0;
    virtual std::size_t cols() const noexcept = 0;

    /// (trans ? F^T : F) * x
    virtual DenseMatrix apply_left(const DenseMatrix& x, bool trans) const = 0;
    /// x * (trans ? F^T : F)
    virtual DenseMatrix apply_right(const DenseMatrix& x, bool trans) const = 0;
    /// Dense materialization of F (not transposed).
    virtual DenseMatrix densify() const = 0;

    void check_left(const DenseMatrix& x, bool trans) const {
        const std::size_t need = trans ? rows() : cols();
        if (x.rows() != need) {
            throw DimensionError("factor apply: expected operand with " + std::to_string(need) +
                                 " rows, got " + std::to_string(x.rows()));
        }
    }
    void check_right(const DenseMatrix& x, bool trans) const {
        const std::size_t need = trans ? cols() : rows();
        if (x.cols() != need) {
            throw DimensionError("factor apply: expected operand with " + std::to_string(need) +
                                 " columns, got " + std::to_string(x.cols()));
        }
    }
};

namespace {

class IdentityImpl final : public StructuredFactor::Impl {
public:
    IdentityImpl(std::size_t n, double scale) : n_(n), scale_(scale) {
        if (n == 0) throw DimensionError("identity factor requires dimension >= 1");
        if (!std::isfinite(scale)) throw ValueError("identity factor scale must be finite");
    }

    FactorKind kind() const noexcept override { return FactorKind::Identity; }
    std::size_t rows() const noexcept override { return n_; }
    std::size_t cols() const noexcept override { return n_; }
    double scale() const noexcept { return scale_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        return scaled(x);
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        return scaled(x);
    }
    DenseMatrix densify() const override {
        DenseMatrix out(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) out(i, i) = scale_;
        return out;
    }

private:
    DenseMatrix scaled(const DenseMatrix& x) const {
        if (scale_ == 1.0) return x;
        return scale_ * x;
    }

    std::size_t n_;
    double scale_;
};

class DenseImpl final : public StructuredFactor::Impl {
public:
    explicit DenseImpl(DenseMatrix a) : a_(std::move(a)), at_(transpose(a_)) {
        if (a_.empty()) throw DimensionError("dense factor must be non-empty");
    }

    FactorKind kind() const noexcept override { return FactorKind::Dense; }
    std::size_t rows() const noexcept override { return a_.rows(); }
    std::size_t cols() const noexcept override { return a_.cols(); }
    const DenseMatrix& payload() const noexcept { return a_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        return (trans ? at_ : a_) * x;
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        return x * (trans ? at_ : a_);
    }
    DenseMatrix densify() const override { return a_; }

private:
    DenseMatrix a_;
    DenseMatrix at_;
};

class SparseImpl final : public StructuredFactor::Impl {
public:
    explicit SparseImpl(SparseMatrix a) : a_(std::move(a)) {}

    FactorKind kind() const noexcept override { return FactorKind::Sparse; }
    std::size_t rows() const noexcept override { return a_.rows(); }
    std::size_t cols() const noexcept override { return a_.cols(); }
    const SparseMatrix& payload() const noexcept { return a_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        return trans ? a_.mul_left_transposed(x) : a_.mul_left(x);
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        return trans ? a_.mul_right_transposed(x) : a_.mul_right(x);
    }
    DenseMatrix densify() const override { return a_.to_dense(); }

private:
    SparseMatrix a_;
};

class DiagonalImpl final : public StructuredFactor::Impl {
public:
    explicit DiagonalImpl(std::vector<double> d) : d_(std::move(d)) {
        if (d_.empty()) throw DimensionError("diagonal factor requires at least one entry");
        require_finite_values(d_, "diagonal factor");
    }

    FactorKind kind() const noexcept override { return FactorKind::Diagonal; }
    std::size_t rows() const noexcept override { return d_.size(); }
    std::size_t cols() const noexcept override { return d_.size(); }
    const std::vector<double>& payload() const noexcept { return d_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        DenseMatrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double s = d_[i];
            for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = s * x(i, j);
        }
        opcount::add(x.size());
        return out;
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        DenseMatrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * d_[j];
        }
        opcount::add(x.size());
        return out;
    }
    DenseMatrix densify() const override {
        DenseMatrix out(d_.size(), d_.size());
        for (std::size_t i = 0; i < d_.size(); ++i) out(i, i) = d_[i];
        return out;
    }

private:
    std::vector<double> d_;
};

/// Circulant C(i,j) = c[(i-j) mod n].  C*y is the cyclic convolution c*y and
/// C^T*y the cyclic cross-correlation, both evaluated through one forward and
/// one inverse real FFT with a pointwise spectral product in between.
class CirculantImpl final : public StructuredFactor::Impl {
public:
    explicit CirculantImpl(std::vector<double> c) : c_(std::move(c)), n_(c_.size()) {
        if (n_ == 0) throw DimensionError("circulant factor requires at least one entry");
        require_finite_values(c_, "circulant factor");

        const std::size_t nc = n_ / 2 + 1;
        spectrum_.resize(nc);
        std::vector<double> real_buf(n_);
        std::vector<std::complex<double>> cplx_buf(nc);
        {
            std::lock_guard<std::mutex> lock(fftw_plan_mutex());
            fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_buf.data(),
                                        reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
            bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_),
                                        reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                        real_buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        if (fwd_ == nullptr || bwd_ == nullptr) {
            throw NumericalError("FFT plan creation failed for circulant factor");
        }
        std::copy(c_.begin(), c_.end(), real_buf.begin());
        fftw_execute_dft_r2c(fwd_, real_buf.data(),
                             reinterpret_cast<fftw_complex*>(cplx_buf.data()));
        spectrum_ = cplx_buf;
    }

    ~CirculantImpl() override {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
        if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
    }

    CirculantImpl(const CirculantImpl&) = delete;
    CirculantImpl& operator=(const CirculantImpl&) = delete;

    FactorKind kind() const noexcept override { return FactorKind::Circulant; }
    std::size_t rows() const noexcept override { return n_; }
    std::size_t cols() const noexcept override { return n_; }
    const std::vector<double>& payload() const noexcept { return c_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        DenseMatrix out(x.rows(), x.cols());
        std::vector<double> buf(n_);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            for (std::size_t i = 0; i < n_; ++i) buf[i] = x(i, j);
            convolve(buf, trans);
            for (std::size_t i = 0; i < n_; ++i) out(i, j) = buf[i];
        }
        return out;
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        // Row r of x*C is C^T applied to that row, so the correlation flag flips.
        DenseMatrix out(x.rows(), x.cols());
        std::vector<double> buf(n_);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < n_; ++j) buf[j] = x(i, j);
            convolve(buf, !trans);
            for (std::size_t j = 0; j < n_; ++j) out(i, j) = buf[j];
        }
        return out;
    }
    DenseMatrix densify() const override {
        DenseMatrix out(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) out(i, j) = c_[(i + n_ - j) % n_];
        }
        return out;
    }

private:
    void convolve(std::vector<double>& y, bool correlate) const {
        const std::size_t nc = n_ / 2 + 1;
        std::vector<std::complex<double>> freq(nc);
        fftw_execute_dft_r2c(fwd_, y.data(), reinterpret_cast<fftw_complex*>(freq.data()));
        for (std::size_t i = 0; i < nc; ++i) {
            const std::complex<double> s = correlate ? std::conj(spectrum_[i]) : spectrum_[i];
            freq[i] *= s / static_cast<double>(n_);
        }
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(freq.data()), y.data());
        // Nominal FFT work: two transforms at ~2.5 n log2 n plus n pointwise products.
        opcount::add(5 * n_ * ceil_log2(n_) + 4 * n_);
    }

    std::vector<double> c_;
    std::size_t n_;
    std::vector<std::complex<double>> spectrum_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// Selection matrix S: full_dim x kept.size(), S(kept[j], j) = 1.
class DownsamplerImpl final : public StructuredFactor::Impl {
public:
    DownsamplerImpl(std::size_t full_dim, std::vector<std::size_t> kept)
        : full_(full_dim), kept_(std::move(kept)) {
        if (full_ == 0) throw DimensionError("downsampler requires full dimension >= 1");
        if (kept_.empty()) throw DimensionError("downsampler must keep at least one index");
        for (std::size_t j = 0; j < kept_.size(); ++j) {
            if (kept_[j] >= full_) {
                throw ValueError("downsampler index " + std::to_string(kept_[j]) +
                                 " out of range for dimension " + std::to_string(full_));
            }
            if (j > 0 && kept_[j] <= kept_[j - 1]) {
                throw ValueError("downsampler indices must be strictly increasing");
            }
        }
    }

    FactorKind kind() const noexcept override { return FactorKind::Downsampler; }
    std::size_t rows() const noexcept override { return full_; }
    std::size_t cols() const noexcept override { return kept_.size(); }
    std::size_t full_dim() const noexcept { return full_; }
    const std::vector<std::size_t>& kept() const noexcept { return kept_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        if (trans) {
            // S^T x: gather the kept rows.
            DenseMatrix out(kept_.size(), x.cols());
            for (std::size_t j = 0; j < kept_.size(); ++j) {
                for (std::size_t c = 0; c < x.cols(); ++c) out(j, c) = x(kept_[j], c);
            }
            return out;
        }
        // S x: scatter rows into the full grid.
        DenseMatrix out(full_, x.cols());
        for (std::size_t j = 0; j < kept_.size(); ++j) {
            for (std::size_t c = 0; c < x.cols(); ++c) out(kept_[j], c) = x(j, c);
        }
        return out;
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        if (trans) {
            // x S^T: scatter columns into the full grid.
            DenseMatrix out(x.rows(), full_);
            for (std::size_t r = 0; r < x.rows(); ++r) {
                for (std::size_t j = 0; j < kept_.size(); ++j) out(r, kept_[j]) = x(r, j);
            }
            return out;
        }
        // x S: gather the kept columns.
        DenseMatrix out(x.rows(), kept_.size());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t j = 0; j < kept_.size(); ++j) out(r, j) = x(r, kept_[j]);
        }
        return out;
    }
    DenseMatrix densify() const override {
        DenseMatrix out(full_, kept_.size());
        for (std::size_t j = 0; j < kept_.size(); ++j) out(kept_[j], j) = 1.0;
        return out;
    }

private:
    std::size_t full_;
    std::vector<std::size_t> kept_;
};

class ProductImpl final : public StructuredFactor::Impl {
public:
    explicit ProductImpl(std::vector<StructuredFactor> chain) : chain_(std::move(chain)) {
        if (chain_.empty()) throw DimensionError("product factor requires at least one child");
        for (std::size_t i = 0; i + 1 < chain_.size(); ++i) {
            if (chain_[i].cols() != chain_[i + 1].rows()) {
                throw DimensionError("product factor children " + std::to_string(i) + " and " +
                                     std::to_string(i + 1) + " have incompatible shapes");
            }
        }
    }

    FactorKind kind() const noexcept override { return FactorKind::Product; }
    std::size_t rows() const noexcept override { return chain_.front().rows(); }
    std::size_t cols() const noexcept override { return chain_.back().cols(); }
    const std::vector<StructuredFactor>& chain() const noexcept { return chain_; }

    DenseMatrix apply_left(const DenseMatrix& x, bool trans) const override {
        check_left(x, trans);
        DenseMatrix acc = x;
        if (trans) {
            // (F1...Fk)^T x = Fk^T ... F1^T x.
            for (const StructuredFactor& f : chain_) acc = f.transposed().apply_left(acc);
            return acc;
        }
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) acc = it->apply_left(acc);
        return acc;
    }
    DenseMatrix apply_right(const DenseMatrix& x, bool trans) const override {
        check_right(x, trans);
        DenseMatrix acc = x;
        if (trans) {
            for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
                acc = it->transposed().apply_right(acc);
            }
            return acc;
        }
        for (const StructuredFactor& f : chain_) acc = f.apply_right(acc);
        return acc;
    }
    DenseMatrix densify() const override {
        DenseMatrix acc = chain_.front().densify();
        for (std::size_t i = 1; i < chain_.size(); ++i) acc = acc * chain_[i].densify();
        return acc;
    }

private:
    std::vector<StructuredFactor> chain_;
};

template <typename T, typename... Args>
std::shared_ptr<const StructuredFactor::Impl> make_impl(Args&&... args) {
    return std::make_shared<const T>(std::forward<Args>(args)...);
}

const IdentityImpl& as_identity(const StructuredFactor::Impl& impl) {
    if (impl.kind() != FactorKind::Identity) throw ValueError("factor is not an identity");
    return static_cast<const IdentityImpl&>(impl);
}

}  // namespace

StructuredFactor StructuredFactor::identity(std::size_t n, double scale) {
    return StructuredFactor(make_impl<IdentityImpl>(n, scale), false);
}
StructuredFactor StructuredFactor::dense(DenseMatrix a) {
    return StructuredFactor(make_impl<DenseImpl>(std::move(a)), false);
}
StructuredFactor StructuredFactor::sparse(SparseMatrix a) {
    return StructuredFactor(make_impl<SparseImpl>(std::move(a)), false);
}
StructuredFactor StructuredFactor::diagonal(std::vector<double> d) {
    return StructuredFactor(make_impl<DiagonalImpl>(std::move(d)), false);
}
StructuredFactor StructuredFactor::circulant(std::vector<double> first_column) {
    return StructuredFactor(make_impl<CirculantImpl>(std::move(first_column)), false);
}
StructuredFactor StructuredFactor::downsampler(std::size_t full_dim,
                                               std::vector<std::size_t> kept) {
    return StructuredFactor(make_impl<DownsamplerImpl>(full_dim, std::move(kept)), false);
}
StructuredFactor StructuredFactor::downsampler_grid(std::size_t height, std::size_t width,
                                                    std::size_t stride) {
    if (height == 0 || width == 0) throw DimensionError("downsampler grid must be non-empty");
    if (stride == 0) throw ValueError("downsampler stride must be >= 1");
    std::vector<std::size_t> kept;
    for (std::size_t y = 0; y < height; y += stride) {
        for (std::size_t x = 0; x < width; x += stride) kept.push_back(y * width + x);
    }
    return downsampler(height * width, std::move(kept));
}
StructuredFactor StructuredFactor::product(std::vector<StructuredFactor> chain) {
    return StructuredFactor(make_impl<ProductImpl>(std::move(chain)), false);
}

StructuredFactor StructuredFactor::transposed() const {
    return StructuredFactor(impl_, !transpose_);
}

FactorKind StructuredFactor::kind() const noexcept { return impl_->kind(); }

bool StructuredFactor::is_unit_identity() const noexcept {
    return impl_->kind() == FactorKind::Identity &&
           static_cast<const IdentityImpl&>(*impl_).scale() == 1.0;
}

std::size_t StructuredFactor::rows() const noexcept {
    return transpose_ ? impl_->cols() : impl_->rows();
}
std::size_t StructuredFactor::cols() const noexcept {
    return transpose_ ? impl_->rows() : impl_->cols();
}

DenseMatrix StructuredFactor::apply_left(const DenseMatrix& x) const {
    return impl_->apply_left(x, transpose_);
}
DenseMatrix StructuredFactor::apply_right(const DenseMatrix& x) const {
    return impl_->apply_right(x, transpose_);
}

DenseMatrix StructuredFactor::densify() const {
    DenseMatrix d = impl_->densify();
    return transpose_ ? transpose(d) : d;
}

double StructuredFactor::identity_scale() const { return as_identity(*impl_).scale(); }

const DenseMatrix& StructuredFactor::dense_payload() const {
    if (impl_->kind() != FactorKind::Dense) throw ValueError("factor is not dense");
    return static_cast<const DenseImpl&>(*impl_).payload();
}
const SparseMatrix& StructuredFactor::sparse_payload() const {
    if (impl_->kind() != FactorKind::Sparse) throw ValueError("factor is not sparse");
    return static_cast<const SparseImpl&>(*impl_).payload();
}
const std::vector<double>& StructuredFactor::diagonal_payload() const {
    if (impl_->kind() != FactorKind::Diagonal) throw ValueError("factor is not diagonal");
    return static_cast<const DiagonalImpl&>(*impl_).payload();
}
const std::vector<double>& StructuredFactor::circulant_first_column() const {
    if (impl_->kind() != FactorKind::Circulant) throw ValueError("factor is not circulant");
    return static_cast<const CirculantImpl&>(*impl_).payload();
}
std::size_t StructuredFactor::downsampler_full_dim() const {
    if (impl_->kind() != FactorKind::Downsampler) throw ValueError("factor is not a downsampler");
    return static_cast<const DownsamplerImpl&>(*impl_).full_dim();
}
const std::vector<std::size_t>& StructuredFactor::downsampler_kept() const {
    if (impl_->kind() != FactorKind::Downsampler) throw ValueError("factor is not a downsampler");
    return static_cast<const DownsamplerImpl&>(*impl_).kept();
}
const std::vector<StructuredFactor>& StructuredFactor::product_chain() const {
    if (impl_->kind() != FactorKind::Product) throw ValueError("factor is not a product");
    return static_cast<const ProductImpl&>(*impl_).chain();
}

}  // namespace glme
