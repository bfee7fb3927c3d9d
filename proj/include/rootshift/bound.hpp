#ifndef ROOTSHIFT_BOUND_HPP
#define ROOTSHIFT_BOUND_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "rootshift/ideal.hpp"
#include "rootshift/multipoly.hpp"

namespace rootshift {

/// A direction polynomial phi distributed into the system by an invertible
/// matrix F: the perturbation vector is F * (phi, 0, ..., 0)^T, so only the
/// first column of F matters for the deformation itself.
struct PerturbationSpec {
    MultiPoly phi;
    Eigen::MatrixXd F;
    int k = 0;        // certified ideal power this phi is matched against
    int k_prime = 0;  // total degree of phi

    /// phi added to the listed equations (1-based row indices); F is the
    /// identity with its first column replaced by the indicator of `rows`,
    /// column-swapped if needed to stay invertible.
    static PerturbationSpec for_rows(MultiPoly phi, const std::vector<int>& rows_1based,
                                     int n, int k = 0);

    /// Perturbation polynomial for equation i (0-based): F(i,0) * phi.
    MultiPoly row_poly(int i) const;

    /// Exponent vectors of phi outside the window k+1 <= |alpha| <= k'.
    /// Empty means the support hypothesis holds.
    std::vector<Exponents> support_violations() const;
};

/// Sup-norm envelope of the certificate cofactors times all monomial shifts
/// x^beta with |beta| <= k' - k - 1, maximized over the certificate rows:
/// the constant multiplying ||phi|| and mu^2 in the safe-perturbation bound.
struct CertConstant {
    double rigorous = 0.0;  // coefficient bound, valid upper bound on the max
    double sampled = 0.0;   // grid-sampled lower estimate, diagnostic only
};

CertConstant certificate_constant(const IdealCertificate& cert, const Box& K, int k_prime,
                                  int grid_per_axis = 32);

/// t* = 1 / (phi_norm * c_value * mu^2). Throws on non-positive input.
double perturbation_bound(double phi_norm, double c_value, std::uint64_t mu);

/// Invertibility of id + A. When max |a_ij| < 1/mu^2 the answer is true by
/// the determinant expansion; otherwise falls back to an explicit
/// determinant test and records which path decided.
struct Lemma1Result {
    bool invertible = false;
    bool via_hypothesis = false;  // true: entry bound; false: determinant fallback
    double max_abs_entry = 0.0;
    double det = 0.0;
};

Lemma1Result lemma1_invertible(const Eigen::MatrixXd& A);

/// Everything needed to audit one bound computation.
struct BoundReport {
    double phi_norm = 0.0;
    double c_rigorous = 0.0;
    double c_sampled = 0.0;
    std::uint64_t mu = 0;
    double t_star = 0.0;
    Box box;
    int k = 0;
    int k_prime = 0;
    int ell = 1;
    double certificate_residual = 0.0;
};

/// Assembles the report from a valid certificate and perturbation over K.
BoundReport make_bound_report(const IdealCertificate& cert, const PerturbationSpec& pert,
                              const Box& K);

}  // namespace rootshift

#endif
