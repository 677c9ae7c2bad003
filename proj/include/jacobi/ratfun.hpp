// Rational functions num/den over the even polynomial ring, used by the
// differential-geometric layer (inverse metrics, Christoffel symbols,
// curvature).  No gcd cancellation is attempted beyond stripping common
// monomial content; equality is decided exactly by cross multiplication,
// which is sound because the coefficient ring has no zero divisors.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobi/superpoly.hpp"

namespace jacobi {

struct DivisionByZero : std::runtime_error {
    explicit DivisionByZero(const std::string& w) : std::runtime_error(w) {}
};

class RationalFunction {
  public:
    RationalFunction() : num_(), den_(Rational(1)) {}
    RationalFunction(const Rational& c) : num_(SuperPoly(c)), den_(Rational(1)) {}
    RationalFunction(const SuperPoly& p) : num_(p), den_(Rational(1)) {}
    // throws DivisionByZero when den is the zero polynomial
    RationalFunction(SuperPoly num, SuperPoly den);

    const SuperPoly& num() const { return num_; }
    const SuperPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    // the exact rational value when num/den is a constant, nullopt otherwise
    std::optional<Rational> as_constant() const;

    RationalFunction operator-() const;
    friend RationalFunction operator+(const RationalFunction& a,
                                      const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a,
                                      const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a,
                                      const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a,
                                      const RationalFunction& b);
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
    RationalFunction& operator/=(const RationalFunction& o) { return *this = *this / o; }

    // a/b == c/d  iff  a*d == c*b
    friend bool operator==(const RationalFunction& a, const RationalFunction& b);
    friend bool operator!=(const RationalFunction& a, const RationalFunction& b) {
        return !(a == b);
    }

    // partial derivative (quotient rule); v is expected even
    RationalFunction partial(const Var& v) const;

    std::string str() const;

  private:
    void normalize();
    SuperPoly num_, den_;
};

// square-matrix helpers over the polynomial/rational rings ------------------

using PolyMatrix = std::vector<std::vector<SuperPoly>>;
using RatMatrix = std::vector<std::vector<RationalFunction>>;

SuperPoly poly_det(const PolyMatrix& m);
RationalFunction rat_det(const RatMatrix& m);

// inverse of a polynomial matrix via adjugate / determinant; throws
// DivisionByZero when the determinant vanishes identically
RatMatrix poly_matrix_inverse(const PolyMatrix& m);

}  // namespace jacobi
