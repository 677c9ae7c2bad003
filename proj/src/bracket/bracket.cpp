#include "jacobi/bracket.hpp"

#include <algorithm>

#include "jacobi/varcalc.hpp"

namespace jacobi {

namespace {

// recursive core of the evaluation map: peel odd partials of P from the right
// (slot 1 first) and multiply by the even factors d^s(delta_i f)
SuperPoly jeval(const SuperPoly& P, const std::vector<SuperPoly>& fs,
                std::size_t k, int n) {
    if (k == fs.size()) return P;
    SuperPoly res;
    long top = P.max_jet_order();
    for (int i = 1; i <= n; ++i) {
        for (long s = 0; s <= top; ++s) {
            SuperPoly dP = P.partial(Var::odd(i, static_cast<int>(s)));
            if (dP.is_zero()) continue;
            SuperPoly fac =
                variational_derivative(fs[k], i, n).dtotal_pow(s, n);
            if (fac.is_zero()) continue;
            res += jeval(dP, fs, k + 1, n) * fac;
        }
    }
    return res;
}

}  // namespace

SuperPoly multivector_evaluate(const SuperPoly& P,
                               const std::vector<SuperPoly>& fs, int n) {
    for (const auto& f : fs)
        if (f.super_degree() != 0)
            throw std::runtime_error("evaluation arguments must be even");
    SuperPoly res = jeval(P, fs, 0, n);
    SuperPoly Pz = P.partial(Var::zeta());
    if (!Pz.is_zero() && !fs.empty()) {
        for (std::size_t k = 0; k < fs.size(); ++k) {
            std::vector<SuperPoly> rest;
            for (std::size_t l = 0; l < fs.size(); ++l)
                if (l != k) rest.push_back(fs[l]);
            SuperPoly term = jeval(Pz, rest, 0, n) * energy(fs[k], n);
            if (k % 2) term = -term;
            res += term;
        }
    }
    return res;
}

SuperPoly sn_bracket(const SuperPoly& P, const SuperPoly& Q, int n) {
    SuperPoly res;
    // per super-homogeneous component of both arguments
    int ptop = 0, qtop = 0;
    for (const auto& [m, c] : P.terms()) ptop = std::max(ptop, m.super_degree());
    for (const auto& [m, c] : Q.terms()) qtop = std::max(qtop, m.super_degree());
    for (int p = 0; p <= ptop; ++p) {
        SuperPoly Pp = P.super_part(p);
        if (Pp.is_zero()) continue;
        Rational sgn = p % 2 ? -1 : 1;
        for (int q = 0; q <= qtop; ++q) {
            SuperPoly Qq = Q.super_part(q);
            if (Qq.is_zero()) continue;
            for (int i = 1; i <= n; ++i) {
                res += variational_derivative_odd(Pp, i, n) *
                       variational_derivative(Qq, i, n);
                res += sgn * (variational_derivative(Pp, i, n) *
                              variational_derivative_odd(Qq, i, n));
            }
            res += Pp.partial(Var::zeta()) * energy_hat(Qq, n);
            res += sgn * (energy_hat(Pp, n) * Qq.partial(Var::zeta()));
        }
    }
    return res;
}

SuperPoly DpOperator::apply(const SuperPoly& Q) const {
    SuperPoly res = scalar * Q + zeta_coeff * Q.partial(Var::zeta());
    long top = Q.max_jet_order();
    SuperPoly Pz = -scalar;  // dd_zeta(P)
    for (int i = 1; i <= n; ++i) {
        SuperPoly Xis = X[i - 1];  // X^{i,s}, built incrementally
        SuperPoly Yis = Y[i - 1];
        for (long s = 0; s <= top; ++s) {
            if (s > 0) {
                Xis = Xis.dtotal(n) +
                      Pz * SuperPoly::even_var(i, static_cast<int>(s));
                Yis = Yis.dtotal(n) +
                      Pz * SuperPoly::odd_var(i, static_cast<int>(s));
            }
            res += Xis * Q.partial(Var::even(i, static_cast<int>(s)));
            res += Yis * Q.partial(Var::odd(i, static_cast<int>(s)));
        }
    }
    return res;
}

DpOperator dp_operator(const SuperPoly& P, int n) {
    int p = P.super_degree();
    if (p < 0) throw std::runtime_error("dp_operator needs homogeneous input");
    DpOperator D;
    D.n = n;
    D.p = p;
    SuperPoly Pz = P.partial(Var::zeta());
    Rational sgn = p % 2 ? -1 : 1;
    D.scalar = -Pz;
    D.zeta_coeff = sgn * energy_hat(P, n);
    for (int i = 1; i <= n; ++i) {
        D.X.push_back(variational_derivative_odd(P, i, n));
        D.Y.push_back(sgn * (variational_derivative(P, i, n) -
                             SuperPoly::odd_var(i, 0) * Pz));
    }
    return D;
}

SuperPoly dp_apply(const SuperPoly& P, const SuperPoly& Q, int n) {
    return dp_operator(P, n).apply(Q);
}

namespace {

// (P wedge-bar Q)(fs): sum over (q, p-1) shuffles of the slots
SuperPoly wedge_bar(const SuperPoly& P, int p, const SuperPoly& Q, int q,
                    const std::vector<SuperPoly>& fs, int n) {
    if (q == 0) {
        // insert the functional Q into the first slot of P
        std::vector<SuperPoly> args;
        args.push_back(Q);
        for (const auto& f : fs) args.push_back(f);
        return multivector_evaluate(P, args, n);
    }
    int total = p + q - 1;
    if (static_cast<int>(fs.size()) != total)
        throw std::runtime_error("wedge_bar: wrong number of arguments");
    SuperPoly res;
    // choose the q slots fed to Q (increasing); the rest go to P in order
    std::vector<int> pick(q);
    auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == q) {
            std::vector<SuperPoly> qa, pa;
            std::vector<bool> used(total, false);
            for (int t : pick) {
                qa.push_back(fs[t]);
                used[t] = true;
            }
            // permutation sign of (pick..., rest...)
            long inv = 0;
            for (int t = 0; t < q; ++t)
                for (int r = 0; r < total; ++r)
                    if (!used[r] && r < pick[t]) ++inv;
            SuperPoly inner = multivector_evaluate(Q, qa, n);
            for (int r = 0; r < total; ++r)
                if (!used[r]) pa.push_back(fs[r]);
            std::vector<SuperPoly> args;
            args.push_back(inner);
            for (auto& f : pa) args.push_back(f);
            SuperPoly term = multivector_evaluate(P, args, n);
            if (inv % 2) term = -term;
            res += term;
            return;
        }
        for (int j = start; j <= total - (q - depth); ++j) {
            pick[depth] = j;
            self(self, j + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);
    return res;
}

}  // namespace

SuperPoly nr_bracket_eval(const SuperPoly& P, const SuperPoly& Q,
                          const std::vector<SuperPoly>& fs, int n) {
    int p = P.super_degree(), q = Q.super_degree();
    if (p < 0 || q < 0)
        throw std::runtime_error("nr_bracket_eval needs homogeneous input");
    SuperPoly res;
    if (!(p == 0 && q > 0))
        res += Rational(((p + 1) * q) % 2 ? -1 : 1) *
               wedge_bar(P, p, Q, q, fs, n);
    if (!(q == 0 && p > 0))
        res += Rational(p % 2 ? -1 : 1) * wedge_bar(Q, q, P, p, fs, n);
    return res;
}

bool check_jacobi(const SuperPoly& P, int n) {
    return zero_test(sn_bracket(P, P, n), n);
}

bool check_compatible(const SuperPoly& P, const SuperPoly& Q, int n) {
    return zero_test(sn_bracket(P, Q, n), n);
}

// ---------------------------------------------------------------------------
// operator presentation
// ---------------------------------------------------------------------------

OperatorMatrix OperatorMatrix::zero(int n) {
    OperatorMatrix A;
    A.n = n;
    A.entries.assign(n, std::vector<Entry>(n));
    return A;
}

SuperPoly OperatorMatrix::coeff(int i, int j, int k) const {
    SuperPoly r;
    for (const auto& [c, s] : entries[i - 1][j - 1])
        if (s == k) r += c;
    return r;
}

int OperatorMatrix::max_power() const {
    int m = 0;
    for (const auto& row : entries)
        for (const auto& e : row)
            for (const auto& [c, s] : e) m = std::max(m, s);
    return m;
}

namespace {

// shift component indices by n to build elements of the tensor square, used
// for the tail symmetry check
SuperPoly shift_components(const SuperPoly& f, int n) {
    SuperPoly::Substitution sub;
    for (const auto& [m, c] : f.terms())
        for (const auto& [v, e] : m.even)
            sub.images[v] = SuperPoly::even_var(v.i + n, v.s);
    return f.substitute(sub);
}

}  // namespace

bool is_skew_adjoint(const OperatorMatrix& A) {
    int top = A.max_power();
    for (int i = 1; i <= A.n; ++i) {
        for (int j = 1; j <= A.n; ++j) {
            for (int m = 0; m <= top; ++m) {
                // (A^t)^{ij}_m = sum_s (-1)^s C(s,m) d^{s-m}(A^{ji}_s)
                SuperPoly t;
                for (int s = m; s <= top; ++s) {
                    Rational c{binomial(s, m)};
                    if (s % 2) c = -c;
                    t += c * A.coeff(j, i, s).dtotal_pow(s - m);
                }
                if (!(A.coeff(i, j, m) + t).is_zero()) return false;
            }
        }
    }
    // tail part: sum a d^{-1} b must equal sum b d^{-1} a
    if (!A.tails.empty()) {
        SuperPoly fwd, bwd;
        for (const auto& t : A.tails) {
            fwd += t.a * shift_components(t.b, A.n);
            bwd += t.b * shift_components(t.a, A.n);
        }
        if (!(fwd - bwd).is_zero()) return false;
    }
    return true;
}

SuperPoly bivector_from_operator(const OperatorMatrix& A) {
    if (!is_skew_adjoint(A)) throw NotSkewAdjoint("operator is not skew-adjoint");
    SuperPoly P;
    for (int i = 1; i <= A.n; ++i)
        for (int j = 1; j <= A.n; ++j)
            for (const auto& [c, s] : A.entries[i - 1][j - 1])
                P += Rational(1, 2) * SuperPoly::odd_var(i, 0) * c *
                     SuperPoly::odd_var(j, s);
    for (const auto& t : A.tails) {
        if (A.n != 1)
            throw UnsupportedTailShape("nonlocal tails supported for n = 1 only");
        // a d^{-1} b with b = c u^{1,1}: d^{-1}(b theta) = -c zeta
        auto multiple_of_ux = [](const SuperPoly& f) -> std::pair<bool, Rational> {
            if (f.size() != 1) return {false, 0};
            const auto& [m, c] = *f.terms().begin();
            Monomial ux;
            ux.even.emplace_back(Var::even(1, 1), Rational(1));
            if (!(m == ux)) return {false, 0};
            return {true, c};
        };
        if (auto [ok, c] = multiple_of_ux(t.b); ok) {
            P += Rational(-1, 2) * c * SuperPoly::odd_var(1, 0) * t.a *
                 SuperPoly::zeta();
        } else if (auto [ok2, c2] = multiple_of_ux(t.a); ok2) {
            // move d off the left factor by parts: theta a = c d(-zeta)
            P += Rational(1, 2) * c2 * SuperPoly::zeta() * t.b *
                 SuperPoly::odd_var(1, 0);
        } else {
            throw UnsupportedTailShape(
                "tail must have u_x on one side of the d^{-1}");
        }
    }
    return P;
}

OperatorMatrix operator_from_bivector(const SuperPoly& P, int n) {
    if (P.super_degree() != 2)
        throw std::runtime_error("operator presentation needs a bivector");
    OperatorMatrix A = OperatorMatrix::zero(n);
    SuperPoly Pz = P.partial(Var::zeta());
    SuperPoly local = P - SuperPoly::zeta() * Pz;
    for (int i = 1; i <= n; ++i) {
        SuperPoly Zi = variational_derivative_odd(local, i, n);
        long top = Zi.max_jet_order();
        for (int j = 1; j <= n; ++j)
            for (long s = 0; s <= top; ++s) {
                SuperPoly c = Zi.partial(Var::odd(j, static_cast<int>(s)));
                if (!c.is_zero())
                    A.entries[i - 1][j - 1].emplace_back(c,
                                                         static_cast<int>(s));
            }
    }
    if (!Pz.is_zero()) {
        if (n != 1)
            throw UnsupportedTailShape("nonlocal tails supported for n = 1 only");
        // P contains zeta X theta_1 = (1/2) theta_1 (2X) d^{-1}(u^{1,1}) theta_1
        SuperPoly X = Pz.partial(Var::odd(1, 0));
        if (!(Pz - X * SuperPoly::odd_var(1, 0)).is_zero())
            throw UnsupportedTailShape("zeta part is not of the form X theta");
        OperatorMatrix::Tail t;
        t.a = Rational(2) * X;
        t.b = SuperPoly::even_var(1, 1);
        A.tails.push_back(t);
    }
    return A;
}

std::vector<SuperPoly> apply_operator(const OperatorMatrix& A,
                                      const std::vector<SuperPoly>& v) {
    if (static_cast<int>(v.size()) != A.n)
        throw std::runtime_error("apply_operator: wrong argument count");
    std::vector<SuperPoly> out(A.n);
    for (int i = 1; i <= A.n; ++i)
        for (int j = 1; j <= A.n; ++j)
            for (const auto& [c, s] : A.entries[i - 1][j - 1])
                out[i - 1] += c * v[j - 1].dtotal_pow(s);
    for (const auto& t : A.tails)
        out[0] += t.a * invert_total_derivative(t.b * v[0], A.n);
    return out;
}

Json operator_to_json(const OperatorMatrix& A) {
    Json j;
    j["n"] = A.n;
    Json entries = Json::array();
    for (int i = 0; i < A.n; ++i) {
        Json row = Json::array();
        for (int jj = 0; jj < A.n; ++jj) {
            Json e = Json::array();
            for (const auto& [c, s] : A.entries[i][jj])
                e.push_back(Json::array({c.str(), s}));
            row.push_back(e);
        }
        entries.push_back(row);
    }
    j["entries"] = entries;
    Json tails = Json::array();
    for (const auto& t : A.tails)
        tails.push_back(Json::array({t.a.str(), t.b.str()}));
    j["tails"] = tails;
    return j;
}

OperatorMatrix operator_from_json(const Json& j) {
    OperatorMatrix A = OperatorMatrix::zero(j.at("n").get<int>());
    const Json& entries = j.at("entries");
    for (int i = 0; i < A.n; ++i)
        for (int jj = 0; jj < A.n; ++jj)
            for (const auto& term : entries.at(i).at(jj))
                A.entries[i][jj].emplace_back(
                    parse_expression(term.at(0).get<std::string>(), A.n),
                    term.at(1).get<int>());
    if (j.contains("tails"))
        for (const auto& t : j.at("tails")) {
            OperatorMatrix::Tail tail;
            tail.a = parse_expression(t.at(0).get<std::string>(), A.n);
            tail.b = parse_expression(t.at(1).get<std::string>(), A.n);
            A.tails.push_back(tail);
        }
    return A;
}

}  // namespace jacobi
