#include "jacobi/superpoly.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace jacobi {

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

long Monomial::diff_degree() const {
    long d = 0;
    for (const auto& [v, e] : even) {
        if (v.s > 0) d += v.s * to_long(e);  // s>=1 exponents are integral
    }
    for (const auto& v : odd) d += v.s;  // zeta has s = 0
    return d;
}

long Monomial::max_jet_order() const {
    long m = 0;
    for (const auto& [v, e] : even) m = std::max<long>(m, v.s);
    for (const auto& v : odd) m = std::max<long>(m, v.s);
    return m;
}

Rational Monomial::exponent_of(const Var& v) const {
    if (v.is_even()) {
        for (const auto& [w, e] : even)
            if (w == v) return e;
        return 0;
    }
    for (const auto& w : odd)
        if (w == v) return 1;
    return 0;
}

bool mono_less(const Monomial& a, const Monomial& b) {
    if (a.odd != b.odd)
        return std::lexicographical_compare(a.odd.begin(), a.odd.end(),
                                            b.odd.begin(), b.odd.end());
    // compare even factor lists lexicographically by (var, exponent)
    auto ia = a.even.begin(), ib = b.even.begin();
    for (; ia != a.even.end() && ib != b.even.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.even.end() && ib != b.even.end();
}

static void check_exponent(const Var& v, const Rational& e) {
    if (v.s >= 1 && !(is_integer(e) && e > 0))
        throw std::runtime_error(
            "jet variable exponent must be a positive integer");
}

int mono_mul(const Monomial& a, const Monomial& b, Monomial& out) {
    out.even.clear();
    out.odd.clear();
    // merge even parts
    auto ia = a.even.begin(), ib = b.even.begin();
    while (ia != a.even.end() || ib != b.even.end()) {
        if (ib == b.even.end() || (ia != a.even.end() && ia->first < ib->first)) {
            out.even.push_back(*ia++);
        } else if (ia == a.even.end() || ib->first < ia->first) {
            out.even.push_back(*ib++);
        } else {
            Rational e = ia->second + ib->second;
            if (e != 0) {
                check_exponent(ia->first, e);
                out.even.emplace_back(ia->first, e);
            }
            ++ia;
            ++ib;
        }
    }
    // merge odd parts, counting inversions for the sign
    long inversions = 0;
    auto oa = a.odd.begin(), ob = b.odd.begin();
    while (oa != a.odd.end() || ob != b.odd.end()) {
        if (ob == b.odd.end()) {
            out.odd.push_back(*oa++);
        } else if (oa == a.odd.end()) {
            out.odd.push_back(*ob++);
        } else if (*oa == *ob) {
            return 0;  // repeated odd factor
        } else if (*oa < *ob) {
            out.odd.push_back(*oa++);
        } else {
            // *ob jumps over the remaining factors of a
            inversions += a.odd.end() - oa;
            out.odd.push_back(*ob++);
        }
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

// ---------------------------------------------------------------------------
// SuperPoly basics
// ---------------------------------------------------------------------------

SuperPoly::SuperPoly(const Rational& c) {
    if (c != 0) terms_[Monomial{}] = c;
}

SuperPoly SuperPoly::var(const Var& v) {
    SuperPoly p;
    Monomial m;
    if (v.is_even())
        m.even.emplace_back(v, 1);
    else
        m.odd.push_back(v);
    p.terms_[m] = 1;
    return p;
}

SuperPoly SuperPoly::even_pow(int i, int s, const Rational& e) {
    if (e == 0) return SuperPoly(Rational(1));
    Var v = Var::even(i, s);
    check_exponent(v, e);
    SuperPoly p;
    Monomial m;
    m.even.emplace_back(v, e);
    p.terms_[m] = 1;
    return p;
}

void SuperPoly::add_term(Monomial m, Rational c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(std::move(m), std::move(c));
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

SuperPoly SuperPoly::operator-() const {
    SuperPoly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

SuperPoly& SuperPoly::operator+=(const SuperPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

SuperPoly& SuperPoly::operator-=(const SuperPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

SuperPoly operator*(const SuperPoly& a, const SuperPoly& b) {
    SuperPoly r;
    Monomial prod;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            int sign = mono_mul(ma, mb, prod);
            if (sign == 0) continue;
            Rational c = ca * cb;
            r.add_term(prod, sign > 0 ? c : -c);
        }
    }
    return r;
}

SuperPoly SuperPoly::operator*(const Rational& c) const {
    SuperPoly r;
    if (c == 0) return r;
    for (const auto& [m, k] : terms_) r.terms_[m] = k * c;
    return r;
}

SuperPoly SuperPoly::pow(long e) const {
    if (e < 0) throw std::runtime_error("negative power of a SuperPoly");
    SuperPoly r{Rational(1)};
    for (long k = 0; k < e; ++k) r *= *this;
    return r;
}

// ---------------------------------------------------------------------------
// gradations
// ---------------------------------------------------------------------------

int SuperPoly::super_degree() const {
    int p = -1;
    for (const auto& [m, c] : terms_) {
        int q = m.super_degree();
        if (p == -1)
            p = q;
        else if (p != q)
            return -1;
    }
    return p == -1 ? 0 : p;
}

bool SuperPoly::is_local() const {
    for (const auto& [m, c] : terms_)
        if (!m.odd.empty() && m.odd.front().kind == VarKind::Zeta) return false;
    return true;
}

std::vector<std::pair<long, SuperPoly>> SuperPoly::degree_decompose() const {
    std::map<long, SuperPoly> parts;
    for (const auto& [m, c] : terms_) parts[m.diff_degree()].add_term(m, c);
    return {parts.begin(), parts.end()};
}

SuperPoly SuperPoly::degree_part(long d) const {
    SuperPoly r;
    for (const auto& [m, c] : terms_)
        if (m.diff_degree() == d) r.add_term(m, c);
    return r;
}

std::optional<long> SuperPoly::nu() const {
    std::optional<long> k;
    for (const auto& [m, c] : terms_) {
        long d = m.diff_degree();
        if (!k || d < *k) k = d;
    }
    return k;
}

long SuperPoly::max_jet_order() const {
    long r = 0;
    for (const auto& [m, c] : terms_) r = std::max(r, m.max_jet_order());
    return r;
}

long SuperPoly::max_diff_degree() const {
    long r = 0;
    for (const auto& [m, c] : terms_) r = std::max(r, m.diff_degree());
    return r;
}

Rational SuperPoly::constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
}

SuperPoly SuperPoly::super_part(int p) const {
    SuperPoly r;
    for (const auto& [m, c] : terms_)
        if (m.super_degree() == p) r.add_term(m, c);
    return r;
}

// ---------------------------------------------------------------------------
// derivations
// ---------------------------------------------------------------------------

SuperPoly SuperPoly::partial(const Var& v) const {
    SuperPoly r;
    if (v.is_even()) {
        for (const auto& [m, c] : terms_) {
            for (std::size_t k = 0; k < m.even.size(); ++k) {
                if (m.even[k].first != v) continue;
                Monomial d = m;
                Rational e = d.even[k].second;
                if (e == 1)
                    d.even.erase(d.even.begin() + k);
                else
                    d.even[k].second = e - 1;
                r.add_term(std::move(d), c * e);
                break;
            }
        }
    } else {
        // LEFT derivative: sign (-1)^k where k = #odd factors to the left
        for (const auto& [m, c] : terms_) {
            for (std::size_t k = 0; k < m.odd.size(); ++k) {
                if (m.odd[k] != v) continue;
                Monomial d = m;
                d.odd.erase(d.odd.begin() + k);
                r.add_term(std::move(d), (k % 2 == 0) ? c : -c);
                break;
            }
        }
    }
    return r;
}

SuperPoly SuperPoly::dtotal(int n) const {
    // collect support variables once
    std::set<Var> evens, odds;
    bool has_zeta = false;
    for (const auto& [m, c] : terms_) {
        for (const auto& [v, e] : m.even) evens.insert(v);
        for (const auto& v : m.odd) {
            if (v.kind == VarKind::Zeta)
                has_zeta = true;
            else
                odds.insert(v);
        }
    }
    SuperPoly r;
    for (const auto& v : evens)
        r += SuperPoly::even_var(v.i, v.s + 1) * partial(v);
    for (const auto& v : odds)
        r += SuperPoly::odd_var(v.i, v.s + 1) * partial(v);
    if (has_zeta) {
        if (n <= 0)
            throw std::runtime_error(
                "dtotal of a zeta-dependent polynomial needs the dimension n");
        SuperPoly dz = partial(Var::zeta());
        for (int i = 1; i <= n; ++i)
            r -= SuperPoly::even_var(i, 1) * SuperPoly::odd_var(i, 0) * dz;
    }
    return r;
}

SuperPoly SuperPoly::dtotal_pow(long k, int n) const {
    SuperPoly r = *this;
    for (long t = 0; t < k; ++t) r = r.dtotal(n);
    return r;
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

namespace {

// exact e-th power of a rational for rational exponent e (used only when a
// fractional exponent hits a monomial image); throws when no exact root.
Rational rat_pow_rational(const Rational& base, const Rational& e) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    if (is_integer(e)) return rat_pow(base, to_long(e));
    if (base == 1) return 1;
    long num = static_cast<long>(numerator(e));
    long den = static_cast<long>(denominator(e));
    // exact den-th root of base, then num-th power
    auto iroot = [](const Int& x, long k) -> Int {
        if (x < 0) throw std::runtime_error("no exact rational root");
        Int lo = 0, hi = x + 1;
        while (lo + 1 < hi) {
            Int mid = (lo + hi) / 2;
            Int p = 1;
            for (long t = 0; t < k; ++t) p *= mid;
            if (p <= x)
                lo = mid;
            else
                hi = mid;
        }
        Int p = 1;
        for (long t = 0; t < k; ++t) p *= lo;
        if (p != x) throw std::runtime_error("no exact rational root");
        return lo;
    };
    Int rn = iroot(numerator(base), den);
    Int rd = iroot(denominator(base), den);
    return rat_pow(Rational(rn, rd), num);
}

}  // namespace

SuperPoly SuperPoly::substitute(const Substitution& sub) const {
    SuperPoly result;
    for (const auto& [m, c] : terms_) {
        SuperPoly term{c};
        for (const auto& [v, e] : m.even) {
            auto it = sub.images.find(v);
            if (it == sub.images.end()) {
                term *= SuperPoly::even_pow(v.i, v.s, e);
                continue;
            }
            const SuperPoly& img = it->second;
            if (img.super_degree() != 0)
                throw std::runtime_error(
                    "substitution image of an even variable must have "
                    "super-degree 0");
            if (is_integer(e) && e > 0) {
                term *= img.pow(to_long(e));
            } else {
                // fractional/negative exponent: image must be one monomial
                if (img.size() != 1)
                    throw std::runtime_error(
                        "fractional power of a non-monomial substitution "
                        "image");
                const auto& [im, ic] = *img.terms().begin();
                if (!im.odd.empty())
                    throw std::runtime_error("odd factor under even power");
                SuperPoly f{rat_pow_rational(ic, e)};
                for (const auto& [w, we] : im.even)
                    f *= SuperPoly::even_pow(w.i, w.s, we * e);
                term *= f;
            }
        }
        // odd factors, in canonical (stored) order; graded product keeps signs
        for (const auto& v : m.odd) {
            auto it = sub.images.find(v);
            if (it == sub.images.end()) {
                term *= SuperPoly::var(v);
            } else {
                if (it->second.super_degree() != 1)
                    throw std::runtime_error(
                        "substitution image of an odd variable must have "
                        "super-degree 1");
                term *= it->second;
            }
        }
        result += term;
    }
    return result;
}

SuperPoly SuperPoly::substitute_even(const std::map<int, SuperPoly>& images) const {
    // lazily prolong u[i,0] |-> images.at(i) to the jet orders present
    for (const auto& [i, img] : images)
        if (img.super_degree() != 0)
            throw std::runtime_error(
                "even substitution image contains odd variables");
    std::map<int, long> need;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m.even)
            if (images.count(v.i))
                need[v.i] = std::max(need[v.i], static_cast<long>(v.s));
    Substitution sub;
    for (const auto& [i, top] : need) {
        SuperPoly img = images.at(i);
        sub.images[Var::even(i, 0)] = img;
        for (long s = 1; s <= top; ++s) {
            img = img.dtotal();
            sub.images[Var::even(i, static_cast<int>(s))] = img;
        }
    }
    return substitute(sub);
}

SuperPoly SuperPoly::jets_to_zero() const {
    SuperPoly r;
    for (const auto& [m, c] : terms_) {
        bool jet = false;
        for (const auto& [v, e] : m.even)
            if (v.s >= 1) jet = true;
        for (const auto& v : m.odd)
            if (v.s >= 1) jet = true;
        if (!jet) r.add_term(m, c);
    }
    return r;
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

void print_exponent(std::ostream& os, const Rational& e) {
    if (is_integer(e) && e > 0)
        os << '^' << e;
    else
        os << "^(" << rat_to_string(e) << ')';
}

void print_var(std::ostream& os, const Var& v) {
    switch (v.kind) {
        case VarKind::Zeta: os << 'z'; break;
        case VarKind::Odd: os << "t[" << v.i << ',' << v.s << ']'; break;
        case VarKind::Even: os << "u[" << v.i << ',' << v.s << ']'; break;
    }
}

void print_monomial(std::ostream& os, const Monomial& m, const Rational& coeff) {
    Rational a = coeff < 0 ? -coeff : coeff;
    bool printed = false;
    if (a != 1 || m.is_constant()) {
        os << rat_to_string(a);
        printed = true;
    }
    for (const auto& [v, e] : m.even) {
        if (printed) os << '*';
        print_var(os, v);
        if (e != 1) print_exponent(os, e);
        printed = true;
    }
    for (const auto& v : m.odd) {
        if (printed) os << '*';
        print_var(os, v);
        printed = true;
    }
}

}  // namespace

std::string SuperPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (first) {
            if (c < 0) os << '-';
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        print_monomial(os, m, c);
    }
    return os.str();
}

}  // namespace jacobi
