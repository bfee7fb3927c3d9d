#include "rootshift/ideal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace rootshift {

NotInIdealError::NotInIdealError(Exponents worst, double residual, int k)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "monomial of degree " << k << " not in gradient ideal (residual " << residual
             << ")";
          return os.str();
      }()),
      worst_(std::move(worst)),
      residual_(residual),
      k_(k) {}

std::uint64_t monomial_count(int n, int k) {
    if (n < 1 || k < 0) throw std::invalid_argument("monomial_count requires n >= 1, k >= 0");
    // binomial(k + n - 1, n - 1), multiplicative form
    std::uint64_t r = 1;
    for (int i = 1; i <= n - 1; ++i) r = r * (k + i) / i;
    return r;
}

namespace {

// Index of the lattice spanned by the rows of M inside Z^d, or nullopt when
// the rows have rank < d. Smith-style elimination with exact integers.
std::optional<long long> lattice_index(std::vector<std::vector<long long>> M, int d) {
    if (d == 0) return 1;  // trivial lattice (n = 1)
    const int rows = static_cast<int>(M.size());
    if (rows < d) return std::nullopt;

    long long index = 1;
    int r = 0;  // current pivot position
    for (int c = 0; c < d; ++c) {
        // gcd-reduce column c below row r via Euclidean row operations
        while (true) {
            int piv = -1;
            for (int i = r; i < rows; ++i)
                if (M[i][c] != 0 && (piv == -1 || std::abs(M[i][c]) < std::abs(M[piv][c])))
                    piv = i;
            if (piv == -1) break;
            std::swap(M[piv], M[r]);
            bool done = true;
            for (int i = r + 1; i < rows; ++i) {
                if (M[i][c] == 0) continue;
                const long long q = M[i][c] / M[r][c];
                for (int j = c; j < d; ++j) M[i][j] -= q * M[r][j];
                if (M[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (r >= rows || M[r][c] == 0) return std::nullopt;  // rank deficient
        index *= std::abs(M[r][c]);
        ++r;
        if (r == d) break;
    }
    if (r < d) return std::nullopt;
    return index;
}

}  // namespace

LatticeReport lattice_check(const MultiPoly& f) {
    LatticeReport report;
    if (f.is_zero()) return report;
    const int n = f.var_count();
    const int deg = *f.total_degree();

    std::vector<Exponents> top;
    for (const auto& [e, c] : f.terms())
        if (exponent_degree(e) == deg) top.push_back(e);
    // v_1 is the leading (grlex-largest) exponent, as in the display order
    std::reverse(top.begin(), top.end());

    if (top.size() < 2) return report;  // no differences: infinite index

    // Differences v_1 - v_j, expressed in the basis e_i - e_{i+1} of the
    // sublattice {sum = 0}; the coordinates are the partial sums.
    std::vector<std::vector<long long>> coords;
    for (std::size_t j = 1; j < top.size(); ++j) {
        std::vector<long long> diff(n);
        for (int i = 0; i < n; ++i) diff[i] = static_cast<long long>(top[0][i]) - top[j][i];
        report.difference_vectors.push_back(diff);
        std::vector<long long> c(n - 1);
        long long run = 0;
        for (int i = 0; i + 1 < n; ++i) {
            run += diff[i];
            c[i] = run;
        }
        coords.push_back(std::move(c));
    }
    report.index = lattice_index(std::move(coords), n - 1);
    return report;
}

bool is_convenient(const MultiPoly& f) {
    const int n = f.var_count();
    std::vector<bool> axis(n, false);
    for (const auto& [e, c] : f.terms()) {
        int nz = -1;
        bool pure = true;
        for (int i = 0; i < n; ++i) {
            if (e[i] == 0) continue;
            if (nz != -1) {
                pure = false;
                break;
            }
            nz = i;
        }
        if (pure && nz != -1) axis[nz] = true;
    }
    return std::all_of(axis.begin(), axis.end(), [](bool b) { return b; });
}

std::optional<IdealCertificate> try_certify_ideal_power(const PolySystem& sys, int k,
                                                        const CertifyOptions& opts,
                                                        CertifyFailure* failure) {
    const int n = sys.dim();
    const MultiPoly& f = sys.distinguished();
    const int m = *f.total_degree();
    if (k < 1) throw std::invalid_argument("certificate power k must be >= 1");
    if (k < m - 1) throw std::invalid_argument("degree mismatch: k < m_ell - 1 admits no cofactors");

    std::vector<MultiPoly> grad;
    grad.reserve(n);
    for (int j = 0; j < n; ++j) grad.push_back(f.partial(j));

    const int shift_deg = k - m + 1;
    const auto shifts = monomials_of_degree(n, shift_deg);
    const auto targets = monomials_of_degree(n, k);

    // Column polynomials x^beta * d f / dx_j and the row index of every
    // monomial they touch (plus the degree-k targets themselves).
    std::vector<MultiPoly> columns;
    columns.reserve(shifts.size() * n);
    std::map<Exponents, int, GrlexLess> row_of;
    auto intern = [&row_of](const Exponents& e) {
        auto [it, inserted] = row_of.emplace(e, static_cast<int>(row_of.size()));
        return it->second;
    };
    for (const auto& t : targets) intern(t);
    for (int j = 0; j < n; ++j)
        for (const auto& beta : shifts) {
            columns.push_back(grad[j].shifted(beta));
            for (const auto& [e, c] : columns.back().terms()) intern(e);
        }

    const int rows = static_cast<int>(row_of.size());
    const int cols = static_cast<int>(columns.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (const auto& [e, v] : columns[c].terms()) A(row_of.at(e), c) = v;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    cod.setThreshold(opts.rank_cutoff);

    IdealCertificate cert;
    cert.ell = sys.ell();
    cert.k = k;
    cert.mu = monomial_count(n, k);

    for (const auto& target : targets) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
        b[row_of.at(target)] = 1.0;
        Eigen::VectorXd c = cod.solve(b);

        const double cmax = c.cwiseAbs().maxCoeff();
        IdealCertificate::Entry entry;
        entry.monomial = target;
        entry.cofactors.assign(n, MultiPoly(n));
        for (int j = 0; j < n; ++j)
            for (std::size_t s = 0; s < shifts.size(); ++s) {
                const double v = c[j * static_cast<int>(shifts.size()) + static_cast<int>(s)];
                if (std::abs(v) > opts.cleanup_rel * cmax)
                    entry.cofactors[j].add_term(shifts[s], v);
            }

        // Re-expansion residual, computed with polynomial arithmetic rather
        // than the least-squares machinery above.
        MultiPoly recon(n);
        for (int j = 0; j < n; ++j) recon += entry.cofactors[j] * grad[j];
        MultiPoly diff = MultiPoly::monomial(n, target) - recon;
        entry.residual = diff.max_abs_coeff();

        if (entry.residual > opts.tolerance) {
            if (failure) {
                failure->worst_monomial = target;
                failure->residual = entry.residual;
            }
            return std::nullopt;
        }
        cert.residual = std::max(cert.residual, entry.residual);
        cert.entries.push_back(std::move(entry));
    }
    return cert;
}

IdealCertificate certify_ideal_power(const PolySystem& sys, int k, const CertifyOptions& opts) {
    CertifyFailure failure;
    auto cert = try_certify_ideal_power(sys, k, opts, &failure);
    if (!cert) throw NotInIdealError(failure.worst_monomial, failure.residual, k);
    return *cert;
}

std::optional<int> minimal_certified_k(const PolySystem& sys, int cap, const CertifyOptions& opts) {
    if (cap < 1) throw std::invalid_argument("cap must be >= 1");
    const int m = *sys.distinguished().total_degree();
    for (int k = std::max(1, m - 1); k <= cap; ++k) {
        if (try_certify_ideal_power(sys, k, opts)) return k;
    }
    return std::nullopt;
}

}  // namespace rootshift
