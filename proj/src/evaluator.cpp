#include "rootshift/evaluator.hpp"

#include <cmath>

namespace rootshift {

CompiledPoly::CompiledPoly(const MultiPoly& p) : n(p.var_count()) {
    coeffs.reserve(p.term_count());
    exps.reserve(p.term_count() * n);
    for (const auto& [e, c] : p.terms()) {
        coeffs.push_back(c);
        exps.insert(exps.end(), e.begin(), e.end());
    }
}

double CompiledPoly::eval_d(const std::vector<std::vector<double>>& powers) const {
    double sum = 0.0, comp = 0.0;
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
        double v = coeffs[t];
        const int* e = &exps[t * n];
        for (int i = 0; i < n; ++i) v *= powers[i][e[i]];
        const double s = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - s) + v;
        else
            comp += (v - s) + sum;
        sum = s;
    }
    return sum + comp;
}

DD CompiledPoly::eval_dd(const std::vector<std::vector<DD>>& powers) const {
    DD sum{};
    for (std::size_t t = 0; t < coeffs.size(); ++t) {
        DD v{coeffs[t]};
        const int* e = &exps[t * n];
        for (int i = 0; i < n; ++i) v *= powers[i][e[i]];
        sum += v;
    }
    return sum;
}

PolyVecEvaluator::PolyVecEvaluator(const std::vector<MultiPoly>& polys)
    : n_(static_cast<int>(polys.size())) {
    jac_polys_.reserve(n_ * n_);
    for (int i = 0; i < n_; ++i) {
        if (polys[i].var_count() != n_)
            throw std::invalid_argument("evaluator needs a square polynomial vector");
        f_compiled_.emplace_back(polys[i]);
        max_degree_ = std::max(max_degree_, polys[i].total_degree().value_or(0));
        for (int j = 0; j < n_; ++j) jac_polys_.push_back(polys[i].partial(j));
    }
    for (const auto& p : jac_polys_) jac_compiled_.emplace_back(p);
    pow_d_.assign(n_, std::vector<double>(max_degree_ + 1, 1.0));
    pow_dd_.assign(n_, std::vector<DD>(max_degree_ + 1, DD(1.0)));
}

void PolyVecEvaluator::fill_powers_d(std::span<const double> x) const {
    for (int i = 0; i < n_; ++i) {
        pow_d_[i][0] = 1.0;
        for (int k = 1; k <= max_degree_; ++k) pow_d_[i][k] = pow_d_[i][k - 1] * x[i];
    }
}

void PolyVecEvaluator::fill_powers_dd(const std::vector<DD>& x) const {
    for (int i = 0; i < n_; ++i) {
        pow_dd_[i][0] = DD(1.0);
        for (int k = 1; k <= max_degree_; ++k) pow_dd_[i][k] = pow_dd_[i][k - 1] * x[i];
    }
}

void PolyVecEvaluator::eval_f(std::span<const double> x, Eigen::VectorXd& out) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("point dimension mismatch");
    fill_powers_d(x);
    out.resize(n_);
    for (int i = 0; i < n_; ++i) out[i] = f_compiled_[i].eval_d(pow_d_);
}

void PolyVecEvaluator::eval_jacobian(std::span<const double> x, Eigen::MatrixXd& out) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("point dimension mismatch");
    fill_powers_d(x);
    out.resize(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out(i, j) = jac_compiled_[i * n_ + j].eval_d(pow_d_);
}

double PolyVecEvaluator::jacobian_det(std::span<const double> x) const {
    Eigen::MatrixXd J;
    eval_jacobian(x, J);
    if (n_ == 1) return J(0, 0);
    if (n_ == 2) return J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    return Eigen::PartialPivLU<Eigen::MatrixXd>(J).determinant();
}

double PolyVecEvaluator::residual(std::span<const double> x) const {
    Eigen::VectorXd f;
    eval_f(x, f);
    return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
}

void PolyVecEvaluator::eval_f_dd(const std::vector<DD>& x, std::vector<DD>& out) const {
    fill_powers_dd(x);
    out.resize(n_);
    for (int i = 0; i < n_; ++i) out[i] = f_compiled_[i].eval_dd(pow_dd_);
}

void PolyVecEvaluator::eval_jacobian_dd(const std::vector<DD>& x, std::vector<DD>& out) const {
    fill_powers_dd(x);
    out.resize(n_ * n_);
    for (int i = 0; i < n_ * n_; ++i) out[i] = jac_compiled_[i].eval_dd(pow_dd_);
}

double jacobian_det(const PolySystem& sys, std::span<const double> x) {
    return SystemEvaluator(sys).jacobian_det(x);
}

}  // namespace rootshift
