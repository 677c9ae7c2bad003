// The graded super-commutative algebra S = A ⊗ Λ*(V) of differential
// polynomials in even jet variables u[i,s], odd variables t[i,s] (theta) and
// z (zeta), with exact rational coefficients.
//
// Conventions fixed here once and used by every other module:
//   * odd monomial factors are stored in the canonical total order
//     z < t[1,0] < t[1,1] < ... < t[2,0] < ... (zeta first, theta by (i,s));
//     signs produced by reordering are folded into the coefficient;
//   * odd derivatives are LEFT derivatives:
//     d_xi(a*b) = d_xi(a)*b + (-1)^{|a|} a*d_xi(b);
//   * order-0 even variables may carry rational exponents (sqrt(u), 1/rho);
//     jet variables (s >= 1) are strictly polynomial;
//   * differential degree: deg u[i,s] = deg t[i,s] = s, deg t[i,0] = deg z = 0.
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jacobi/rational.hpp"

namespace jacobi {

enum class VarKind : std::uint8_t { Zeta = 0, Odd = 1, Even = 2 };

struct Var {
    VarKind kind = VarKind::Even;
    int i = 1;  // component, 1-based; 0 for zeta
    int s = 0;  // jet order; 0 for zeta

    static Var even(int i, int s) { return Var{VarKind::Even, i, s}; }
    static Var odd(int i, int s) { return Var{VarKind::Odd, i, s}; }
    static Var zeta() { return Var{VarKind::Zeta, 0, 0}; }

    bool is_even() const { return kind == VarKind::Even; }
    bool is_odd_kind() const { return kind != VarKind::Even; }  // theta or zeta

    friend auto operator<=>(const Var&, const Var&) = default;
};

// A monomial in canonical form: even factors sorted by variable with nonzero
// exponents, odd factors a strictly increasing set (zeta first).
struct Monomial {
    std::vector<std::pair<Var, Rational>> even;
    std::vector<Var> odd;

    int super_degree() const { return static_cast<int>(odd.size()); }
    long diff_degree() const;     // gradation (deg u^{i,s} = s)
    long max_jet_order() const;   // max s over all factors (0 if none)
    bool is_constant() const { return even.empty() && odd.empty(); }
    Rational exponent_of(const Var& v) const;  // 0 if absent (odd: 1/0)

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

bool mono_less(const Monomial& a, const Monomial& b);

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return mono_less(a, b);
    }
};

class SuperPoly {
  public:
    using TermMap = std::map<Monomial, Rational, MonoLess>;

    SuperPoly() = default;
    explicit SuperPoly(const Rational& c);
    static SuperPoly var(const Var& v);
    static SuperPoly even_var(int i, int s) { return var(Var::even(i, s)); }
    static SuperPoly odd_var(int i, int s) { return var(Var::odd(i, s)); }
    static SuperPoly zeta() { return var(Var::zeta()); }
    // monomial with a single even variable and the given exponent
    static SuperPoly even_pow(int i, int s, const Rational& e);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // add one term (folds into canonical form; drops zero)
    void add_term(Monomial m, Rational c);

    SuperPoly operator-() const;
    SuperPoly& operator+=(const SuperPoly& o);
    SuperPoly& operator-=(const SuperPoly& o);
    friend SuperPoly operator+(SuperPoly a, const SuperPoly& b) { return a += b; }
    friend SuperPoly operator-(SuperPoly a, const SuperPoly& b) { return a -= b; }
    friend SuperPoly operator*(const SuperPoly& a, const SuperPoly& b);
    SuperPoly& operator*=(const SuperPoly& o) { return *this = *this * o; }
    SuperPoly operator*(const Rational& c) const;
    friend SuperPoly operator*(const Rational& c, const SuperPoly& p) { return p * c; }
    friend bool operator==(const SuperPoly&, const SuperPoly&) = default;

    // integer power (>= 0); uses repeated multiplication
    SuperPoly pow(long e) const;

    // --- gradations ---------------------------------------------------------
    // -1 when not homogeneous in super-degree (mixed); otherwise common p
    int super_degree() const;
    bool is_local() const;  // no zeta factor in any term
    // list of (degree, homogeneous part), ascending; empty for 0
    std::vector<std::pair<long, SuperPoly>> degree_decompose() const;
    SuperPoly degree_part(long d) const;
    // order nu(f): smallest degree with nonzero part; nullopt for 0
    std::optional<long> nu() const;
    long max_jet_order() const;
    long max_diff_degree() const;
    Rational constant_term() const;
    // part of super-degree p
    SuperPoly super_part(int p) const;

    // --- derivations --------------------------------------------------------
    SuperPoly partial(const Var& v) const;  // even ordinary / odd LEFT
    // The extended total derivative. The zeta term -(u^{i,1} t[i,0]) d_zeta
    // runs over i = 1..n, so the ambient dimension is required whenever the
    // input depends on zeta; n = 0 means "no zeta present" and throws
    // otherwise.
    SuperPoly dtotal(int n = 0) const;
    SuperPoly dtotal_pow(long k, int n = 0) const;  // k-fold application

    // --- substitution -------------------------------------------------------
    // Ring endomorphism given by images of individual variables. Variables not
    // present map to themselves. Even images must have super-degree 0; odd
    // images (including zeta's) must have super-degree 1.
    struct Substitution {
        std::map<Var, SuperPoly> images;
        bool has(const Var& v) const { return images.count(v) != 0; }
    };
    SuperPoly substitute(const Substitution& sub) const;

    // Jet-prolonged substitution on even components: images of u[i,0] only,
    // u[i,s] |-> dtotal^s(image). Odd variables are left untouched.
    SuperPoly substitute_even(const std::map<int, SuperPoly>& images) const;

    // degree-0 evaluation: all variables with s >= 1 set to 0 (even and odd)
    SuperPoly jets_to_zero() const;

    // coefficient of theta-like variable v when terms are written v * rest
    // with v leftmost, i.e. the LEFT derivative restricted to terms containing
    // v. (Same as partial(v) -- provided for readability.)
    SuperPoly left_coeff(const Var& v) const { return partial(v); }

    // --- text ---------------------------------------------------------------
    std::string str() const;  // canonical text; parses back to *this

  private:
    TermMap terms_;
};

// graded product of monomials: result monomial and sign (0 when it vanishes)
// The rational exponent invariant (s>=1 integral) is enforced.
int mono_mul(const Monomial& a, const Monomial& b, Monomial& out);

// --- parser -----------------------------------------------------------------
// Grammar: expr := term (('+'|'-') term)*
//          term := factor ('*' factor)*
//          factor := atom ['^' exponent]
//          atom := rational | 'u[i]' | 'u[i,s]' | 't[i]' | 't[i,s]' | 'z'
//                | '(' expr ')' | 'd(' expr ')' | '-' factor
//          exponent := integer | '(' rational ')'
// Throws SyntaxError (with position) on malformed input.
struct SyntaxError : std::runtime_error {
    std::size_t pos;
    SyntaxError(const std::string& what, std::size_t p)
        : std::runtime_error(what + " at position " + std::to_string(p)), pos(p) {}
};
// n is the ambient dimension forwarded to d(...) = dtotal; n = 0 is fine for
// zeta-free arguments of d.
SuperPoly parse_expression(const std::string& src, int n = 0);

}  // namespace jacobi
