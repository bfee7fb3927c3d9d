#include "rootshift/bound.hpp"

#include <cmath>

namespace rootshift {

PerturbationSpec PerturbationSpec::for_rows(MultiPoly phi, const std::vector<int>& rows_1based,
                                            int n, int k) {
    if (phi.var_count() != n) throw std::invalid_argument("phi variable count mismatch");
    if (rows_1based.empty()) throw std::invalid_argument("perturbation needs at least one row");

    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    for (int r : rows_1based) {
        if (r < 1 || r > n) throw std::invalid_argument("perturbation row out of range");
        col[r - 1] = 1.0;
    }
    // Identity with first column replaced by the indicator; swap columns so
    // the pivot row of the indicator keeps the matrix invertible.
    Eigen::MatrixXd F = Eigen::MatrixXd::Identity(n, n);
    F.col(0) = col;
    const int r0 = rows_1based.front() - 1;
    if (r0 != 0) {
        F.col(r0) = Eigen::VectorXd::Unit(n, 0);
    }

    PerturbationSpec spec;
    spec.phi = std::move(phi);
    spec.F = std::move(F);
    spec.k = k;
    spec.k_prime = spec.phi.total_degree().value_or(0);
    return spec;
}

MultiPoly PerturbationSpec::row_poly(int i) const {
    return phi * F(i, 0);
}

std::vector<Exponents> PerturbationSpec::support_violations() const {
    std::vector<Exponents> out;
    for (const auto& [e, c] : phi.terms()) {
        const int d = exponent_degree(e);
        if (d < k + 1 || d > k_prime) out.push_back(e);
    }
    return out;
}

CertConstant certificate_constant(const IdealCertificate& cert, const Box& K, int k_prime,
                                  int grid_per_axis) {
    if (cert.entries.empty()) throw std::invalid_argument("empty certificate");
    const int n = static_cast<int>(cert.entries.front().cofactors.size());
    if (K.dim() != n) throw std::invalid_argument("box dimension mismatch");
    if (k_prime < cert.k + 1) throw std::invalid_argument("k' must be at least k + 1");

    const auto shifts = monomials_up_to_degree(n, k_prime - cert.k - 1);

    // Grid for the sampled lower estimate.
    std::vector<std::vector<double>> axes(n);
    for (int i = 0; i < n; ++i) {
        for (int g = 0; g < grid_per_axis; ++g) {
            const double u = grid_per_axis == 1 ? 0.5 : static_cast<double>(g) / (grid_per_axis - 1);
            axes[i].push_back(K.lo(i) + u * (K.hi(i) - K.lo(i)));
        }
    }
    std::vector<double> x(n);
    std::vector<int> idx(n, 0);

    CertConstant out;
    for (const auto& entry : cert.entries) {
        double row_rigorous = 0.0;
        double row_sampled = 0.0;
        for (const auto& h : entry.cofactors) {
            if (h.is_zero()) continue;
            for (const auto& beta : shifts) {
                const MultiPoly shifted = h.shifted(beta);
                row_rigorous += coeff_bound_on_box(shifted, K);

                double best = 0.0;
                std::fill(idx.begin(), idx.end(), 0);
                while (true) {
                    for (int i = 0; i < n; ++i) x[i] = axes[i][idx[i]];
                    best = std::max(best, std::abs(shifted.evaluate(x)));
                    int i = 0;
                    while (i < n && ++idx[i] == grid_per_axis) idx[i++] = 0;
                    if (i == n) break;
                }
                row_sampled += best;
            }
        }
        out.rigorous = std::max(out.rigorous, row_rigorous);
        out.sampled = std::max(out.sampled, row_sampled);
    }
    return out;
}

double perturbation_bound(double phi_norm, double c_value, std::uint64_t mu) {
    if (!(phi_norm > 0.0) || !(c_value > 0.0) || mu == 0)
        throw std::invalid_argument("perturbation bound factors must be positive");
    return 1.0 / (phi_norm * c_value * static_cast<double>(mu) * static_cast<double>(mu));
}

Lemma1Result lemma1_invertible(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("matrix must be square");
    Lemma1Result r;
    const auto mu = static_cast<double>(A.rows());
    r.max_abs_entry = A.rows() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
    if (r.max_abs_entry < 1.0 / (mu * mu)) {
        r.via_hypothesis = true;
        r.invertible = true;
        r.det = (Eigen::MatrixXd::Identity(A.rows(), A.cols()) + A).determinant();
        return r;
    }
    r.det = (Eigen::MatrixXd::Identity(A.rows(), A.cols()) + A).determinant();
    r.invertible = r.det != 0.0;
    return r;
}

BoundReport make_bound_report(const IdealCertificate& cert, const PerturbationSpec& pert,
                              const Box& K) {
    BoundReport report;
    report.phi_norm = pert.phi.weighted_norm();
    const auto c = certificate_constant(cert, K, pert.k_prime);
    report.c_rigorous = c.rigorous;
    report.c_sampled = c.sampled;
    report.mu = cert.mu;
    report.t_star = perturbation_bound(report.phi_norm, c.rigorous, cert.mu);
    report.box = K;
    report.k = cert.k;
    report.k_prime = pert.k_prime;
    report.ell = cert.ell;
    report.certificate_residual = cert.residual;
    return report;
}

}  // namespace rootshift
