#ifndef ROOTSHIFT_IDEAL_HPP
#define ROOTSHIFT_IDEAL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rootshift/errors.hpp"
#include "rootshift/multipoly.hpp"

namespace rootshift {

/// Number of monomials of total degree exactly k in n variables,
/// i.e. binomial(k + n - 1, n - 1).
std::uint64_t monomial_count(int n, int k);

/// Necessary condition for the gradient ideal of f to contain all monomials
/// of some fixed degree: the differences of the top-degree support vectors
/// must span the full rank-(n-1) sublattice {sum alpha_i = 0} with index 1.
struct LatticeReport {
    std::vector<std::vector<long long>> difference_vectors;
    /// Index of the spanned lattice inside {sum = 0}; empty means the span
    /// has lower rank ("infinite" index).
    std::optional<long long> index;

    bool passes() const { return index.has_value() && *index == 1; }
};

/// Builds the difference vectors of the top-degree exponents of f and
/// computes their lattice index by integer (Smith-style) elimination.
LatticeReport lattice_check(const MultiPoly& f);

/// True when the support of f contains a positive pure power of every
/// variable, so its Newton diagram touches all coordinate axes.
bool is_convenient(const MultiPoly& f);

/// Explicit cofactor witness that every degree-k monomial M_s lies in the
/// gradient ideal of the distinguished polynomial: for each s,
///   M_s = sum_j cofactors[j] * d(f_ell)/dx_j
/// with the coefficientwise re-expansion residual recorded per row.
struct IdealCertificate {
    int ell = 1;  // 1-based
    int k = 0;
    std::uint64_t mu = 0;

    struct Entry {
        Exponents monomial;
        std::vector<MultiPoly> cofactors;  // one per variable
        double residual = 0.0;
    };
    std::vector<Entry> entries;
    double residual = 0.0;  // max over entries
};

struct CertifyFailure {
    Exponents worst_monomial;
    double residual = 0.0;
};

struct CertifyOptions {
    double tolerance = 1e-9;
    /// Relative singular value cutoff for the least-squares rank decision.
    double rank_cutoff = 1e-10;
    /// Cofactor coefficients below this (relative to the largest in the same
    /// solve) are dropped before re-expansion.
    double cleanup_rel = 1e-13;
};

/// Attempts the degree-k certificate for sys.distinguished(). Cofactors are
/// homogeneous of degree k - m_ell + 1, the minimum-norm least-squares
/// solution of the Macaulay system; returns nothing (and fills `failure`)
/// when any monomial's re-expansion residual exceeds the tolerance.
/// Throws std::invalid_argument when k < m_ell - 1 or k < 1.
std::optional<IdealCertificate> try_certify_ideal_power(const PolySystem& sys, int k,
                                                        const CertifyOptions& opts = {},
                                                        CertifyFailure* failure = nullptr);

/// Same as try_certify_ideal_power but throws NotInIdealError on failure.
IdealCertificate certify_ideal_power(const PolySystem& sys, int k, const CertifyOptions& opts = {});

/// Smallest k <= cap with a valid certificate, or empty.
std::optional<int> minimal_certified_k(const PolySystem& sys, int cap = 20,
                                       const CertifyOptions& opts = {});

}  // namespace rootshift

#endif
