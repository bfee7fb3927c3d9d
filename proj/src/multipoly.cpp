#include "rootshift/multipoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rootshift {

int exponent_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
    const int da = exponent_degree(a);
    const int db = exponent_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

MultiPoly::MultiPoly(int var_count) : n_(var_count) {
    if (var_count < 0) throw std::invalid_argument("negative variable count");
}

MultiPoly MultiPoly::constant(int var_count, double c) {
    MultiPoly p(var_count);
    p.add_term(Exponents(var_count, 0), c);
    return p;
}

MultiPoly MultiPoly::monomial(int var_count, Exponents exp, double coeff) {
    MultiPoly p(var_count);
    p.add_term(exp, coeff);
    return p;
}

void MultiPoly::check_exponents(const Exponents& e) const {
    if (static_cast<int>(e.size()) != n_)
        throw std::invalid_argument("exponent vector length does not match variable count");
    for (int v : e)
        if (v < 0) throw std::invalid_argument("negative exponent");
}

std::optional<int> MultiPoly::total_degree() const {
    if (terms_.empty()) return std::nullopt;
    // grlex order: the last term has maximal total degree
    return exponent_degree(terms_.rbegin()->first);
}

std::vector<Exponents> MultiPoly::support() const {
    std::vector<Exponents> out;
    out.reserve(terms_.size());
    for (const auto& [e, c] : terms_) out.push_back(e);
    return out;
}

double MultiPoly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

void MultiPoly::add_term(const Exponents& e, double c) {
    check_exponents(e);
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double MultiPoly::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("point dimension does not match variable count");
    double sum = 0.0;
    double comp = 0.0;  // Neumaier correction
    for (const auto& [e, c] : terms_) {
        double v = c;
        for (int i = 0; i < n_; ++i) {
            for (int k = 0; k < e[i]; ++k) v *= x[i];
        }
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

MultiPoly MultiPoly::partial(int var) const {
    if (var < 0 || var >= n_) throw std::out_of_range("variable index out of range");
    MultiPoly out(n_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        out.add_term(d, c * e[var]);
    }
    return out;
}

double MultiPoly::weighted_norm() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += exponent_degree(e) * std::abs(c);
    return s;
}

double MultiPoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

MultiPoly MultiPoly::operator+(const MultiPoly& rhs) const {
    MultiPoly out = *this;
    out += rhs;
    return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("variable count mismatch");
    for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

MultiPoly MultiPoly::operator-(const MultiPoly& rhs) const {
    MultiPoly out = *this;
    out -= rhs;
    return out;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("variable count mismatch");
    for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
    return *this;
}

MultiPoly MultiPoly::operator*(const MultiPoly& rhs) const {
    if (rhs.n_ != n_) throw std::invalid_argument("variable count mismatch");
    MultiPoly out(n_);
    Exponents e(n_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            for (int i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

MultiPoly MultiPoly::operator*(double s) const {
    MultiPoly out(n_);
    if (s == 0.0) return out;
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, c * s);
    return out;
}

MultiPoly MultiPoly::operator-() const { return *this * -1.0; }

bool MultiPoly::operator==(const MultiPoly& rhs) const {
    return n_ == rhs.n_ && terms_ == rhs.terms_;
}

MultiPoly MultiPoly::shifted(const Exponents& shift) const {
    check_exponents(shift);
    MultiPoly out(n_);
    Exponents e(n_);
    for (const auto& [ea, c] : terms_) {
        for (int i = 0; i < n_; ++i) e[i] = ea[i] + shift[i];
        out.terms_.emplace(e, c);
    }
    return out;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        first = false;
        const double a = std::abs(c);
        const bool pure_const = exponent_degree(e) == 0;
        if (a != 1.0 || pure_const) os << a;
        bool star = (a != 1.0 || pure_const);
        for (int i = 0; i < n_; ++i) {
            if (e[i] == 0) continue;
            if (star) os << "*";
            os << "x" << (i + 1);
            if (e[i] > 1) os << "^" << e[i];
            star = true;
        }
    }
    return os.str();
}

Box::Box(std::vector<std::array<double, 2>> iv) : intervals(std::move(iv)) {
    for (const auto& [lo, hi] : intervals)
        if (!(lo <= hi)) throw std::invalid_argument("box interval with lo > hi");
}

Box Box::symmetric(int var_count, double r) {
    if (r < 0) throw std::invalid_argument("negative box radius");
    return Box(std::vector<std::array<double, 2>>(var_count, {-r, r}));
}

bool Box::contains(std::span<const double> x, double slack) const {
    if (x.size() != intervals.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < intervals[i][0] - slack || x[i] > intervals[i][1] + slack) return false;
    return true;
}

double Box::abs_corner(int i) const {
    return std::max(std::abs(intervals[i][0]), std::abs(intervals[i][1]));
}

double coeff_bound_on_box(const MultiPoly& p, const Box& K) {
    if (K.dim() != p.var_count())
        throw std::invalid_argument("box dimension does not match variable count");
    double bound = 0.0;
    for (const auto& [e, c] : p.terms()) {
        double t = std::abs(c);
        for (int i = 0; i < p.var_count(); ++i) {
            const double m = K.abs_corner(i);
            for (int k = 0; k < e[i]; ++k) t *= m;
        }
        bound += t;
    }
    return bound;
}

PolySystem::PolySystem(std::vector<MultiPoly> polys, int ell_1based) {
    if (polys.empty()) throw std::invalid_argument("empty polynomial system");
    n_ = static_cast<int>(polys.size());
    for (const auto& p : polys) {
        if (p.var_count() != n_)
            throw std::invalid_argument("system must be square: variable count must equal equation count");
        if (p.is_zero()) throw std::invalid_argument("zero polynomial in system (degree undefined)");
    }
    if (ell_1based < 1 || ell_1based > n_) throw std::invalid_argument("ell out of range");

    // Stable sort by ascending total degree, remapping ell to the new position.
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return *polys[a].total_degree() < *polys[b].total_degree();
    });
    polys_.reserve(n_);
    input_position_ = order;
    for (int i = 0; i < n_; ++i) {
        polys_.push_back(std::move(polys[order[i]]));
        degrees_.push_back(*polys_.back().total_degree());
        if (order[i] == ell_1based - 1) ell_ = i + 1;
    }
}

int PolySystem::canonical_index(int input_1based) const {
    if (input_1based < 1 || input_1based > n_) throw std::out_of_range("input index out of range");
    for (int i = 0; i < n_; ++i)
        if (input_position_[i] == input_1based - 1) return i + 1;
    throw std::logic_error("corrupt permutation");
}

std::vector<MultiPoly> PolySystem::polys_in_input_order() const {
    std::vector<MultiPoly> out(n_);
    for (int i = 0; i < n_; ++i) out[input_position_[i]] = polys_[i];
    return out;
}

PolySystem PolySystem::with_ell(int ell_1based) const {
    if (ell_1based < 1 || ell_1based > n_) throw std::invalid_argument("ell out of range");
    PolySystem out = *this;
    out.ell_ = ell_1based;
    return out;
}

namespace {
void monomials_rec(int n, int k, int pos, Exponents& cur, std::vector<Exponents>& out) {
    if (pos == n - 1) {
        cur[pos] = k;
        out.push_back(cur);
        return;
    }
    // grlex within fixed degree = lex descending on leading entries
    for (int v = k; v >= 0; --v) {
        cur[pos] = v;
        monomials_rec(n, k - v, pos + 1, cur, out);
    }
}
}  // namespace

std::vector<Exponents> monomials_of_degree(int n, int k) {
    if (n < 1 || k < 0) throw std::invalid_argument("bad monomial enumeration arguments");
    std::vector<Exponents> out;
    Exponents cur(n, 0);
    monomials_rec(n, k, 0, cur, out);
    // lex descending within a degree is the reverse of grlex; flip for grlex
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<Exponents> monomials_up_to_degree(int n, int k) {
    std::vector<Exponents> out;
    for (int d = 0; d <= k; ++d) {
        auto block = monomials_of_degree(n, d);
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

}  // namespace rootshift
