#ifndef ROOTSHIFT_MULTIPOLY_HPP
#define ROOTSHIFT_MULTIPOLY_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rootshift {

/// Exponent vector of a monomial; entry i is the power of variable i.
using Exponents = std::vector<int>;

/// |alpha| = sum of entries.
int exponent_degree(const Exponents& e);

/// Graded lexicographic order: compare total degree first, then lex.
struct GrlexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

using TermMap = std::map<Exponents, double, GrlexLess>;

/// Sparse multivariate polynomial with real coefficients.
///
/// Canonical form: no stored coefficient is exactly zero and exponent
/// vectors are unique, kept in graded-lex order for deterministic
/// iteration. Values are immutable in spirit: all operations return new
/// polynomials, so sharing across threads is safe.
class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(int var_count);

    static MultiPoly zero(int var_count) { return MultiPoly(var_count); }
    static MultiPoly constant(int var_count, double c);
    static MultiPoly monomial(int var_count, Exponents exp, double coeff = 1.0);

    int var_count() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    /// Total degree; empty for the zero polynomial.
    std::optional<int> total_degree() const;

    /// Exponent vectors with nonzero coefficient, graded-lex order.
    std::vector<Exponents> support() const;

    double coeff(const Exponents& e) const;

    /// Adds c * x^e, dropping the term if the merged coefficient is zero.
    void add_term(const Exponents& e, double c);

    /// Value at x using compensated (Neumaier) summation over terms.
    double evaluate(std::span<const double> x) const;

    /// Formal partial derivative with respect to variable `var` (0-based).
    MultiPoly partial(int var) const;

    /// Degree-weighted coefficient norm: sum over terms of |alpha| * |coeff|.
    double weighted_norm() const;

    /// Largest absolute coefficient; 0 for the zero polynomial.
    double max_abs_coeff() const;

    MultiPoly operator+(const MultiPoly& rhs) const;
    MultiPoly operator-(const MultiPoly& rhs) const;
    MultiPoly operator*(const MultiPoly& rhs) const;
    MultiPoly operator*(double s) const;
    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& rhs);
    MultiPoly& operator-=(const MultiPoly& rhs);

    bool operator==(const MultiPoly& rhs) const;

    /// Multiply by the monomial x^shift (exponentwise shift of the support).
    MultiPoly shifted(const Exponents& shift) const;

    /// Human-readable form like "2*x1^2*x2 - 1", for logs and errors.
    std::string to_string() const;

private:
    void check_exponents(const Exponents& e) const;

    int n_ = 0;
    TermMap terms_;
};

inline MultiPoly operator*(double s, const MultiPoly& p) { return p * s; }

/// Axis-aligned closed box, one [lo, hi] interval per variable.
struct Box {
    std::vector<std::array<double, 2>> intervals;

    Box() = default;
    explicit Box(std::vector<std::array<double, 2>> iv);
    /// Cube [-r, r]^n.
    static Box symmetric(int var_count, double r);

    int dim() const { return static_cast<int>(intervals.size()); }
    double lo(int i) const { return intervals[i][0]; }
    double hi(int i) const { return intervals[i][1]; }
    bool contains(std::span<const double> x, double slack = 0.0) const;
    /// Largest |x_i| over the interval, per variable.
    double abs_corner(int i) const;
};

/// Rigorous upper bound for max over K of |p(x)|:
/// sum over terms of |coeff| * prod_i max(|lo_i|, |hi_i|)^{alpha_i}.
double coeff_bound_on_box(const MultiPoly& p, const Box& K);

/// Square system of n polynomials in n variables.
///
/// Polynomials are stably sorted by ascending total degree on
/// construction; `ell` refers to the position in the *given* list and is
/// remapped to the sorted order. Zero polynomials are rejected.
class PolySystem {
public:
    PolySystem(std::vector<MultiPoly> polys, int ell_1based = 1);

    int dim() const { return n_; }
    const std::vector<MultiPoly>& polys() const { return polys_; }
    const MultiPoly& poly(int i) const { return polys_.at(i); }
    const std::vector<int>& degrees() const { return degrees_; }
    /// Distinguished index, 1-based as in the input file format.
    int ell() const { return ell_; }
    const MultiPoly& distinguished() const { return polys_[ell_ - 1]; }

    PolySystem with_ell(int ell_1based) const;

    /// Sorted position (1-based) of the polynomial that was listed at
    /// `input_1based` on construction, and the polynomials in their
    /// original order. Pairing two systems equation-by-equation must use
    /// the input order; the canonical order depends on the degrees.
    int canonical_index(int input_1based) const;
    std::vector<MultiPoly> polys_in_input_order() const;

private:
    int n_ = 0;
    std::vector<MultiPoly> polys_;
    std::vector<int> degrees_;
    std::vector<int> input_position_;  // canonical slot -> input slot (0-based)
    int ell_ = 1;
};

/// Enumerates all exponent vectors in n variables of total degree exactly k,
/// in graded-lex order.
std::vector<Exponents> monomials_of_degree(int n, int k);

/// Enumerates all exponent vectors of total degree <= k, in graded-lex order.
std::vector<Exponents> monomials_up_to_degree(int n, int k);

}  // namespace rootshift

#endif
