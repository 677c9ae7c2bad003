// Recursive-descent parser for the expression grammar used by the CLI and the
// serializers. print/parse round-trips exactly on canonical text.
#include <cctype>

#include "jacobi/superpoly.hpp"

namespace jacobi {

namespace {

class Parser {
  public:
    Parser(const std::string& src, int n) : src_(src), n_(n) {}

    SuperPoly parse() {
        SuperPoly e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    const std::string& src_;
    int n_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw SyntaxError(what, pos_);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    SuperPoly expr() {
        SuperPoly r = term();
        for (;;) {
            if (eat('+'))
                r += term();
            else if (eat('-'))
                r -= term();
            else
                return r;
        }
    }

    SuperPoly term() {
        SuperPoly r = factor();
        while (eat('*')) r *= factor();
        return r;
    }

    SuperPoly factor() {
        if (eat('-')) return -factor();
        SuperPoly a = atom();
        if (eat('^')) {
            Rational e = exponent();
            // rational exponents only on a single even variable atom
            if (is_integer(e) && e >= 0) return a.pow(to_long(e));
            if (a.size() != 1) fail("rational exponent on a non-monomial");
            const auto& [m, c] = *a.terms().begin();
            if (m.even.size() != 1 || !m.odd.empty() || c != 1 ||
                m.even[0].second != 1)
                fail("rational exponent allowed on a plain even variable only");
            const Var& v = m.even[0].first;
            return SuperPoly::even_pow(v.i, v.s, e);
        }
        return a;
    }

    Rational exponent() {
        if (eat('(')) {
            Rational q = rational_literal(true);
            if (!eat(')')) fail("expected ')' after exponent");
            return q;
        }
        return rational_literal(false);
    }

    Int integer_literal() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) ++pos_;
        if (pos_ == start) fail("expected an integer");
        return Int(src_.substr(start, pos_ - start));
    }

    Rational rational_literal(bool allow_sign) {
        skip_ws();
        bool neg = false;
        if (allow_sign && (peek() == '-' || peek() == '+')) neg = eat('-') || (eat('+'), false);
        Int num = integer_literal();
        Int den = 1;
        if (pos_ < src_.size() && src_[pos_] == '/') {
            ++pos_;
            den = integer_literal();
            if (den == 0) fail("zero denominator");
        }
        Rational q(num, den);
        return neg ? -q : q;
    }

    // u[i] / u[i,s] / t[i] / t[i,s]
    Var bracket_var(VarKind kind) {
        if (!eat('[')) fail("expected '['");
        long i = static_cast<long>(integer_literal());
        long s = 0;
        if (eat(',')) s = static_cast<long>(integer_literal());
        if (!eat(']')) fail("expected ']'");
        if (i < 1) fail("component index must be >= 1");
        return Var{kind, static_cast<int>(i), static_cast<int>(s)};
    }

    SuperPoly atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (std::isdigit((unsigned char)c)) return SuperPoly(rational_literal(false));
        if (c == '(') {
            ++pos_;
            SuperPoly e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (c == 'u') {
            ++pos_;
            return SuperPoly::var(bracket_var(VarKind::Even));
        }
        if (c == 't') {
            ++pos_;
            return SuperPoly::var(bracket_var(VarKind::Odd));
        }
        if (c == 'z') {
            ++pos_;
            return SuperPoly::zeta();
        }
        if (c == 'd') {
            ++pos_;
            if (!eat('(')) fail("expected '(' after d");
            SuperPoly e = expr();
            if (!eat(')')) fail("expected ')'");
            return e.dtotal(n_);
        }
        fail(std::string("unknown token '") + c + "'");
    }
};

}  // namespace

SuperPoly parse_expression(const std::string& src, int n) {
    return Parser(src, n).parse();
}

}  // namespace jacobi
