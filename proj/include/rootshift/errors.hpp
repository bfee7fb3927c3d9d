#ifndef ROOTSHIFT_ERRORS_HPP
#define ROOTSHIFT_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "rootshift/multipoly.hpp"

namespace rootshift {

/// Ideal-membership certification failed: some degree-k monomial is not a
/// combination of the gradient polynomials within tolerance.
class NotInIdealError : public std::runtime_error {
public:
    NotInIdealError(Exponents worst, double residual, int k);
    const Exponents& worst_monomial() const { return worst_; }
    double residual() const { return residual_; }
    int k() const { return k_; }

private:
    Exponents worst_;
    double residual_;
    int k_;
};

/// The deformed system still has a multiple root.
class SplitFailedError : public std::runtime_error {
public:
    explicit SplitFailedError(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled Jacobian was numerically singular.
class RankDeficientError : public std::runtime_error {
public:
    explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rootshift

#endif
