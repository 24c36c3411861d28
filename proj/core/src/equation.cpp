#include "glme/equation.hpp"

#include <utility>

#include "glme/errors.hpp"

namespace glme {

namespace {

void check_factor(const StructuredFactor& f, std::size_t rows, std::size_t cols,
                  const char* role, std::size_t index) {
    if (f.rows() != rows || f.cols() != cols) {
        throw DimensionError(std::string(role) + " factor of term " + std::to_string(index) +
                             " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
                             ", got " + std::to_string(f.rows()) + "x" +
                             std::to_string(f.cols()));
    }
}

void require_square(const StructuredFactor& f, const char* name) {
    if (f.rows() != f.cols()) {
        throw DimensionError(std::string(name) + " must be square, got " +
                             std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
    }
}

/// left * x * right with unit identities skipped.
DenseMatrix sandwich(const StructuredFactor& left, const DenseMatrix& x,
                     const StructuredFactor& right) {
    if (left.is_unit_identity()) {
        return right.is_unit_identity() ? x : right.apply_right(x);
    }
    DenseMatrix t = left.apply_left(x);
    return right.is_unit_identity() ? t : right.apply_right(t);
}

}  // namespace

std::string family_name(Family family) {
    switch (family) {
        case Family::Custom: return "custom";
        case Family::AXB: return "axb";
        case Family::ClassicalSylvester: return "classical_sylvester";
        case Family::GeneralizedSylvester: return "generalized_sylvester";
        case Family::Stein: return "stein";
        case Family::TClassical: return "t_classical";
        case Family::TGeneralized: return "t_generalized";
        case Family::TStein: return "t_stein";
        case Family::LyapunovDiscrete: return "lyapunov_discrete";
        case Family::LyapunovContinuous: return "lyapunov_continuous";
        case Family::StructuredSylvester: return "structured_sylvester";
    }
    throw ValueError("unknown equation family value");
}

Family family_from_name(const std::string& name) {
    if (name == "custom") return Family::Custom;
    if (name == "axb") return Family::AXB;
    if (name == "classical_sylvester") return Family::ClassicalSylvester;
    if (name == "generalized_sylvester") return Family::GeneralizedSylvester;
    if (name == "stein") return Family::Stein;
    if (name == "t_classical") return Family::TClassical;
    if (name == "t_generalized") return Family::TGeneralized;
    if (name == "t_stein") return Family::TStein;
    if (name == "lyapunov_discrete") return Family::LyapunovDiscrete;
    if (name == "lyapunov_continuous") return Family::LyapunovContinuous;
    if (name == "structured_sylvester") return Family::StructuredSylvester;
    throw ValueError("unknown equation family name: " + name);
}

EquationSpec::EquationSpec(std::size_t m, std::size_t n, std::vector<TermPair> linear,
                           std::vector<TermPair> transposed, Family family)
    : m_(m), n_(n), linear_(std::move(linear)), transposed_(std::move(transposed)),
      family_(family) {
    if (m_ == 0 || n_ == 0) throw DimensionError("equation unknown must be non-empty");
    if (linear_.empty() && transposed_.empty()) {
        throw DimensionError("equation requires at least one term");
    }
    if (!linear_.empty()) {
        p_ = linear_.front().left.rows();
        q_ = linear_.front().right.cols();
    } else {
        p_ = transposed_.front().left.rows();
        q_ = transposed_.front().right.cols();
    }
    for (std::size_t k = 0; k < linear_.size(); ++k) {
        check_factor(linear_[k].left, p_, m_, "left linear", k);
        check_factor(linear_[k].right, n_, q_, "right linear", k);
    }
    for (std::size_t j = 0; j < transposed_.size(); ++j) {
        check_factor(transposed_[j].left, p_, n_, "left transposed", j);
        check_factor(transposed_[j].right, m_, q_, "right transposed", j);
    }
}

EquationSpec EquationSpec::axb(StructuredFactor a, StructuredFactor b) {
    const std::size_t m = a.cols();
    const std::size_t n = b.rows();
    std::vector<TermPair> linear{{std::move(a), std::move(b)}};
    return EquationSpec(m, n, std::move(linear), {}, Family::AXB);
}

namespace {

std::vector<TermPair> sylvester_terms(StructuredFactor a, StructuredFactor d) {
    require_square(a, "left coefficient of A X + X D");
    require_square(d, "right coefficient of A X + X D");
    const std::size_t m = a.rows();
    const std::size_t n = d.rows();
    std::vector<TermPair> linear;
    linear.push_back({std::move(a), StructuredFactor::identity(n)});
    linear.push_back({StructuredFactor::identity(m), std::move(d)});
    return linear;
}

}  // namespace

EquationSpec EquationSpec::classical_sylvester(StructuredFactor a, StructuredFactor d) {
    std::vector<TermPair> linear = sylvester_terms(std::move(a), std::move(d));
    const std::size_t m = linear[0].left.rows();
    const std::size_t n = linear[1].right.rows();
    return EquationSpec(m, n, std::move(linear), {}, Family::ClassicalSylvester);
}

EquationSpec EquationSpec::generalized_sylvester(StructuredFactor a, StructuredFactor b,
                                                 StructuredFactor c, StructuredFactor d) {
    const std::size_t m = a.cols();
    const std::size_t n = b.rows();
    std::vector<TermPair> linear;
    linear.push_back({std::move(a), std::move(b)});
    linear.push_back({std::move(c), std::move(d)});
    return EquationSpec(m, n, std::move(linear), {}, Family::GeneralizedSylvester);
}

EquationSpec EquationSpec::stein(StructuredFactor a, StructuredFactor b) {
    require_square(a, "left coefficient of A X B + X");
    require_square(b, "right coefficient of A X B + X");
    const std::size_t m = a.rows();
    const std::size_t n = b.rows();
    std::vector<TermPair> linear;
    linear.push_back({std::move(a), std::move(b)});
    linear.push_back({StructuredFactor::identity(m), StructuredFactor::identity(n)});
    return EquationSpec(m, n, std::move(linear), {}, Family::Stein);
}

EquationSpec EquationSpec::t_classical(StructuredFactor a, StructuredFactor d) {
    // A X + X^T D = E with X m x n, A n x m, D m x n, E n x n.
    const std::size_t m = a.cols();
    const std::size_t n = a.rows();
    std::vector<TermPair> linear;
    linear.push_back({std::move(a), StructuredFactor::identity(n)});
    std::vector<TermPair> transposed;
    transposed.push_back({StructuredFactor::identity(n), std::move(d)});
    return EquationSpec(m, n, std::move(linear), std::move(transposed), Family::TClassical);
}

EquationSpec EquationSpec::t_generalized(StructuredFactor a, StructuredFactor b,
                                         StructuredFactor c, StructuredFactor d) {
    const std::size_t m = a.cols();
    const std::size_t n = b.rows();
    std::vector<TermPair> linear;
    linear.push_back({std::move(a), std::move(b)});
    std::vector<TermPair> transposed;
    transposed.push_back({std::move(c), std::move(d)});
    return EquationSpec(m, n, std::move(linear), std::move(transposed), Family::TGeneralized);
}

EquationSpec EquationSpec::t_stein(StructuredFactor a, StructuredFactor b) {
    // A X B + X^T = E with X m x n, A n x m, B n x m, E n x m.
    const std::size_t m = a.cols();
    const std::size_t n = a.rows();
    std::vector<TermPair> linear;
    linear.push_back({std::move(a), std::move(b)});
    std::vector<TermPair> transposed;
    transposed.push_back({StructuredFactor::identity(n), StructuredFactor::identity(m)});
    return EquationSpec(m, n, std::move(linear), std::move(transposed), Family::TStein);
}

EquationSpec EquationSpec::lyapunov_discrete(StructuredFactor a) {
    require_square(a, "coefficient of A X A^T - X");
    const std::size_t n = a.rows();
    std::vector<TermPair> linear;
    StructuredFactor at = a.transposed();
    linear.push_back({std::move(a), std::move(at)});
    linear.push_back({StructuredFactor::identity(n, -1.0), StructuredFactor::identity(n)});
    return EquationSpec(n, n, std::move(linear), {}, Family::LyapunovDiscrete);
}

EquationSpec EquationSpec::lyapunov_continuous(StructuredFactor a) {
    require_square(a, "coefficient of A X + X A^T");
    const std::size_t n = a.rows();
    std::vector<TermPair> linear;
    StructuredFactor at = a.transposed();
    linear.push_back({std::move(a), StructuredFactor::identity(n)});
    linear.push_back({StructuredFactor::identity(n), std::move(at)});
    return EquationSpec(n, n, std::move(linear), {}, Family::LyapunovContinuous);
}

EquationSpec EquationSpec::structured_sylvester(StructuredFactor a, StructuredFactor d) {
    std::vector<TermPair> linear = sylvester_terms(std::move(a), std::move(d));
    const std::size_t m = linear[0].left.rows();
    const std::size_t n = linear[1].right.rows();
    return EquationSpec(m, n, std::move(linear), {}, Family::StructuredSylvester);
}

DenseMatrix EquationSpec::apply_f(const DenseMatrix& x) const {
    if (x.rows() != m_ || x.cols() != n_) {
        throw DimensionError("f expects a " + std::to_string(m_) + "x" + std::to_string(n_) +
                             " argument, got " + std::to_string(x.rows()) + "x" +
                             std::to_string(x.cols()));
    }
    DenseMatrix out(p_, q_);
    for (const TermPair& t : linear_) {
        add_scaled(out, 1.0, sandwich(t.left, x, t.right));
    }
    if (!transposed_.empty()) {
        const DenseMatrix xt = transpose(x);
        for (const TermPair& t : transposed_) {
            add_scaled(out, 1.0, sandwich(t.left, xt, t.right));
        }
    }
    return out;
}

DenseMatrix EquationSpec::apply_fstar(const DenseMatrix& y) const {
    if (y.rows() != p_ || y.cols() != q_) {
        throw DimensionError("f* expects a " + std::to_string(p_) + "x" + std::to_string(q_) +
                             " argument, got " + std::to_string(y.rows()) + "x" +
                             std::to_string(y.cols()));
    }
    DenseMatrix out(m_, n_);
    for (const TermPair& t : linear_) {
        add_scaled(out, 1.0, sandwich(t.left.transposed(), y, t.right.transposed()));
    }
    if (!transposed_.empty()) {
        const DenseMatrix yt = transpose(y);
        for (const TermPair& t : transposed_) {
            // Adjoint of X -> C X^T D is Y -> D Y^T C.
            add_scaled(out, 1.0, sandwich(t.right, yt, t.left));
        }
    }
    return out;
}

}  // namespace glme
