#ifndef ROOTSHIFT_EVALUATOR_HPP
#define ROOTSHIFT_EVALUATOR_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "rootshift/dd.hpp"
#include "rootshift/multipoly.hpp"

namespace rootshift {

/// Flattened term list of one polynomial, laid out for fast repeated
/// evaluation against a shared table of variable powers.
struct CompiledPoly {
    std::vector<double> coeffs;
    std::vector<int> exps;  // n entries per term
    int n = 0;

    CompiledPoly() = default;
    explicit CompiledPoly(const MultiPoly& p);

    /// Neumaier-compensated sum of terms.
    double eval_d(const std::vector<std::vector<double>>& powers) const;
    /// Plain sum in double-double precision.
    DD eval_dd(const std::vector<std::vector<DD>>& powers) const;
};

/// Evaluates a fixed vector of polynomials (zero entries allowed) and its
/// Jacobian, caching the formal partial derivatives and sharing per-point
/// power tables across all component evaluations.
class PolyVecEvaluator {
public:
    PolyVecEvaluator() = default;
    explicit PolyVecEvaluator(const std::vector<MultiPoly>& polys);

    int dim() const { return n_; }
    const MultiPoly& partial_poly(int i, int j) const { return jac_polys_[i * n_ + j]; }

    void eval_f(std::span<const double> x, Eigen::VectorXd& out) const;
    void eval_jacobian(std::span<const double> x, Eigen::MatrixXd& out) const;
    double jacobian_det(std::span<const double> x) const;
    /// max_i |f_i(x)|
    double residual(std::span<const double> x) const;

    void eval_f_dd(const std::vector<DD>& x, std::vector<DD>& out) const;
    /// Row-major n x n Jacobian.
    void eval_jacobian_dd(const std::vector<DD>& x, std::vector<DD>& out) const;

private:
    void fill_powers_d(std::span<const double> x) const;
    void fill_powers_dd(const std::vector<DD>& x) const;

    int n_ = 0;
    int max_degree_ = 0;
    std::vector<MultiPoly> jac_polys_;        // row-major n x n
    std::vector<CompiledPoly> f_compiled_;    // n
    std::vector<CompiledPoly> jac_compiled_;  // n x n
    mutable std::vector<std::vector<double>> pow_d_;
    mutable std::vector<std::vector<DD>> pow_dd_;
};

/// PolyVecEvaluator bound to a PolySystem.
class SystemEvaluator : public PolyVecEvaluator {
public:
    explicit SystemEvaluator(const PolySystem& sys) : PolyVecEvaluator(sys.polys()), sys_(sys) {}
    const PolySystem& system() const { return sys_; }

private:
    PolySystem sys_;
};

/// Determinant of the Jacobian matrix of `sys` at `x` ("jf" value).
double jacobian_det(const PolySystem& sys, std::span<const double> x);

}  // namespace rootshift

#endif
