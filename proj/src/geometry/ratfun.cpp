#include "jacobi/ratfun.hpp"

#include <map>

namespace jacobi {

namespace {

// common monomial content of a set of polynomials: for every even variable the
// minimum exponent over all terms (0 when the variable misses a term)
std::map<Var, Rational> monomial_content(const std::vector<const SuperPoly*>& ps) {
    std::map<Var, Rational> content;
    bool first = true;
    for (const SuperPoly* p : ps) {
        for (const auto& [m, c] : p->terms()) {
            (void)c;
            std::map<Var, Rational> here;
            for (const auto& [v, e] : m.even) here[v] = e;
            if (first) {
                content = here;
                first = false;
                continue;
            }
            for (auto it = content.begin(); it != content.end();) {
                auto h = here.find(it->first);
                Rational e = (h == here.end()) ? Rational(0) : h->second;
                if (e < it->second) it->second = e;
                if (it->second == Rational(0)) {
                    it = content.erase(it);
                } else {
                    ++it;
                }
            }
            // variables absent from content but present here with negative
            // exponents: content min is negative only if every prior term had
            // a negative exponent as well, which the erase above already
            // handles; nothing to add.
        }
    }
    // strip factors that would need fractional/negative powers of jet
    // variables (s >= 1 exponents must stay integral and nonnegative)
    for (auto it = content.begin(); it != content.end();) {
        if (it->first.s >= 1 && it->second < Rational(0)) {
            it = content.erase(it);
        } else {
            ++it;
        }
    }
    return content;
}

SuperPoly monomial_from(const std::map<Var, Rational>& content, int sign) {
    SuperPoly m(Rational(1));
    for (const auto& [v, e] : content)
        m *= SuperPoly::even_pow(v.i, v.s, sign > 0 ? e : -e);
    return m;
}

}  // namespace

RationalFunction::RationalFunction(SuperPoly num, SuperPoly den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DivisionByZero("rational function with zero denominator");
    normalize();
}

void RationalFunction::normalize() {
    if (num_.is_zero()) {
        den_ = SuperPoly(Rational(1));
        return;
    }
    auto content = monomial_content({&num_, &den_});
    if (!content.empty()) {
        SuperPoly inv = monomial_from(content, -1);
        num_ *= inv;
        den_ *= inv;
    }
    // make the denominator's leading coefficient 1
    Rational lead = den_.terms().begin()->second;
    if (lead != Rational(1)) {
        Rational inv = Rational(1) / lead;
        num_ = num_ * inv;
        den_ = den_ * inv;
    }
    // constant denominator: fold it away entirely
    if (den_ == SuperPoly(Rational(1))) return;
}

std::optional<Rational> RationalFunction::as_constant() const {
    if (num_.is_zero()) return Rational(0);
    const auto& dterm = *den_.terms().begin();
    auto it = num_.terms().find(dterm.first);
    if (it == num_.terms().end()) return std::nullopt;
    Rational c = it->second / dterm.second;
    if (num_ == den_ * c) return c;
    return std::nullopt;
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-b);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.num_.is_zero()) throw DivisionByZero("division by the zero rational function");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ * b.den_ == b.num_ * a.den_;
}

RationalFunction RationalFunction::partial(const Var& v) const {
    SuperPoly dn = num_.partial(v);
    SuperPoly dd = den_.partial(v);
    return RationalFunction(dn * den_ - num_ * dd, den_ * den_);
}

std::string RationalFunction::str() const {
    if (den_ == SuperPoly(Rational(1))) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
}

// --- matrix helpers ---------------------------------------------------------

namespace {

template <typename M, typename E>
E det_laplace(const M& m, const E& zero, const E& one) {
    std::size_t n = m.size();
    if (n == 0) return one;
    if (n == 1) return m[0][0];
    E acc = zero;
    for (std::size_t j = 0; j < n; ++j) {
        M minor;
        for (std::size_t r = 1; r < n; ++r) {
            typename M::value_type row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        E term = m[0][j] * det_laplace(minor, zero, one);
        if (j % 2 == 0) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    return acc;
}

}  // namespace

SuperPoly poly_det(const PolyMatrix& m) {
    return det_laplace(m, SuperPoly(), SuperPoly(Rational(1)));
}

RationalFunction rat_det(const RatMatrix& m) {
    return det_laplace(m, RationalFunction(), RationalFunction(Rational(1)));
}

RatMatrix poly_matrix_inverse(const PolyMatrix& m) {
    std::size_t n = m.size();
    SuperPoly det = poly_det(m);
    if (det.is_zero()) throw DivisionByZero("matrix inverse of a singular matrix");
    RatMatrix inv(n, std::vector<RationalFunction>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            PolyMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<SuperPoly> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            SuperPoly cof = poly_det(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i][j] = RationalFunction(cof, det);
        }
    }
    return inv;
}

}  // namespace jacobi
