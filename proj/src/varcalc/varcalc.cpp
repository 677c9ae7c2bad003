#include "jacobi/varcalc.hpp"

#include <algorithm>
#include <set>

namespace jacobi {

namespace {

// the obstruction term sum_i u^{i,1} theta_i
SuperPoly canonical_one_form(int n) {
    SuperPoly r;
    for (int i = 1; i <= n; ++i)
        r += SuperPoly::even_var(i, 1) * SuperPoly::odd_var(i, 0);
    return r;
}

SuperPoly momentum_impl(const SuperPoly& f, VarKind kind, int i, int alpha,
                        int s, int n) {
    if (s < -1) throw std::runtime_error("momentum: s must be >= -1");
    auto jet = [&](int order) {
        return kind == VarKind::Even ? Var::even(i, order) : Var::odd(i, order);
    };
    if (s == -1) {
        if (alpha < 1) throw std::runtime_error("momentum: s = -1 needs alpha >= 1");
        return f.partial(jet(alpha - 1));
    }
    SuperPoly r;
    long top = f.max_jet_order();
    for (long t = 0; alpha + s + t <= top; ++t) {
        SuperPoly g = f.partial(jet(static_cast<int>(alpha + s + t)));
        if (g.is_zero()) continue;
        Rational c{binomial(t + s, s)};
        if (t % 2) c = -c;
        r += c * g.dtotal_pow(t, n);
    }
    return r;
}

}  // namespace

SuperPoly momentum(const SuperPoly& f, int i, int alpha, int s, int n) {
    return momentum_impl(f, VarKind::Even, i, alpha, s, n);
}

SuperPoly momentum_odd(const SuperPoly& f, int i, int alpha, int s, int n) {
    return momentum_impl(f, VarKind::Odd, i, alpha, s, n);
}

SuperPoly higher_euler(const SuperPoly& f, int i, int s, int n) {
    return momentum(f, i, 0, s, n);
}

SuperPoly higher_euler_odd(const SuperPoly& f, int i, int s, int n) {
    return momentum_odd(f, i, 0, s, n);
}

SuperPoly variational_derivative(const SuperPoly& f, int i, int n) {
    return momentum(f, i, 0, 0, n);
}

SuperPoly variational_derivative_odd(const SuperPoly& f, int i, int n) {
    return momentum_odd(f, i, 0, 0, n);
}

SuperPoly energy_s(const SuperPoly& f, int s, int n) {
    if (s == -1) {
        // the jet shift operator d + (u^{i,1} theta_i) d_zeta
        SuperPoly r = f.dtotal(f.partial(Var::zeta()).is_zero() ? 0 : n);
        r += canonical_one_form(n) * f.partial(Var::zeta());
        return r;
    }
    SuperPoly r;
    long top = f.max_jet_order();
    for (int i = 1; i <= n; ++i) {
        for (long a = 1; a <= top; ++a) {
            r += SuperPoly::even_var(i, static_cast<int>(a)) *
                 momentum(f, i, static_cast<int>(a), s, n);
            r += SuperPoly::odd_var(i, static_cast<int>(a)) *
                 momentum_odd(f, i, static_cast<int>(a), s, n);
        }
    }
    return r;
}

SuperPoly energy(const SuperPoly& f, int n) {
    return energy_s(f, 0, n) - f;
}

SuperPoly normalizer(const SuperPoly& f, int n) {
    SuperPoly r;
    for (int i = 1; i <= n; ++i)
        r += SuperPoly::odd_var(i, 0) * variational_derivative_odd(f, i, n);
    return r;
}

SuperPoly energy_hat(const SuperPoly& f, int n) {
    return energy(f, n) + normalizer(f, n);
}

bool is_total_derivative(const SuperPoly& f, int n) {
    if (f.super_degree() != 0)
        throw std::runtime_error("is_total_derivative needs super-degree 0");
    if (f.constant_term() != 0) return false;
    for (int i = 1; i <= n; ++i)
        if (!variational_derivative(f, i, n).is_zero()) return false;
    return true;
}

namespace {

// antiderivative in the single even variable v, monomial-wise
SuperPoly integrate_even(const SuperPoly& f, const Var& v) {
    SuperPoly r;
    for (const auto& [m, c] : f.terms()) {
        Rational e = m.exponent_of(v);
        if (e == -1) throw NotExact("antiderivative hits a logarithm");
        // raise the exponent of v by one, divide by the new exponent
        Monomial d = m;
        bool found = false;
        for (auto& [w, we] : d.even) {
            if (w == v) {
                we = e + 1;
                found = true;
                break;
            }
        }
        if (!found) {
            d.even.emplace_back(v, Rational(1));
            std::sort(d.even.begin(), d.even.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        r.add_term(std::move(d), c / (e + 1));
    }
    return r;
}

}  // namespace

SuperPoly invert_total_derivative(const SuperPoly& f, int n) {
    (void)n;
    for (const auto& [m, c] : f.terms())
        for (const auto& v : m.odd)
            if (v.kind == VarKind::Zeta)
                throw NotExact("input depends on zeta");
    if (f.constant_term() != 0) throw NotExact("nonzero constant term");

    SuperPoly g, r = f;
    while (!r.is_zero()) {
        long N = r.max_jet_order();
        if (N == 0) throw NotExact("order-0 residual is not exact");
        // collect the level-N variables present
        std::set<Var> top_even, top_odd;
        for (const auto& [m, c] : r.terms()) {
            for (const auto& [v, e] : m.even)
                if (v.s == N) top_even.insert(v);
            for (const auto& v : m.odd)
                if (v.s == N) top_odd.insert(v);
        }
        // an exact element is linear in its top-order variables
        auto check_linear = [&](const Var& v) {
            if (r.partial(v).max_jet_order() >= N)
                throw NotExact("nonlinear in top-order variables");
        };
        for (const auto& v : top_even) check_linear(v);
        for (const auto& v : top_odd) check_linear(v);

        // sequential integration of the closed coefficient one-form in the
        // level-(N-1) variables
        SuperPoly q;
        for (const auto& v : top_even) {
            Var w = Var::even(v.i, v.s - 1);
            SuperPoly a = r.partial(v) - q.partial(w);
            q += integrate_even(a, w);
        }
        for (const auto& v : top_odd) {
            Var w = Var::odd(v.i, v.s - 1);
            SuperPoly b = r.partial(v) - q.partial(w);
            if (!b.partial(w).is_zero())
                throw NotExact("odd antiderivative obstruction");
            q += SuperPoly::var(w) * b;
        }
        r -= q.dtotal();
        if (!r.is_zero() && r.max_jet_order() >= N)
            throw NotExact("top-order stripping failed (not closed)");
        g += q;
    }
    return g;
}

namespace {

bool zero_test_component(const SuperPoly& P, int n, ZeroTestReport& rep) {
    // stage 1: split off zeta and require the zeta part to be exact
    SuperPoly Pb = P.partial(Var::zeta());
    SuperPoly Pa = P - SuperPoly::zeta() * Pb;
    SuperPoly Pp = Pa;
    if (!Pb.is_zero()) {
        SuperPoly Q;
        if (Pb.super_degree() == 0) {
            if (!is_total_derivative(Pb, n)) {
                rep.obstruction = "zeta residue is not a total derivative";
                return false;
            }
        } else {
            for (int i = 1; i <= n; ++i) {
                if (!variational_derivative_odd(Pb, i, n).is_zero()) {
                    rep.obstruction =
                        "zeta residue has a nonzero odd variational derivative";
                    return false;
                }
            }
        }
        try {
            Q = invert_total_derivative(Pb, n);
        } catch (const NotExact&) {
            rep.obstruction = "zeta residue has no local preimage";
            return false;
        }
        // stage 2: zeta Pb = zeta dQ ~ (u^{i,1} theta_i) Q modulo exact terms
        Pp += canonical_one_form(n) * Q;
    }
    rep.local_representative += Pp;
    // stage 3: local test by super-degree
    if (Pp.is_zero()) return true;
    int p = Pp.super_degree();
    if (p == 0) {
        if (Pp.constant_term() != 0) {
            rep.obstruction = "nonzero constant term";
            return false;
        }
        for (int i = 1; i <= n; ++i) {
            if (!variational_derivative(Pp, i, n).is_zero()) {
                rep.obstruction = "nonzero variational derivative";
                return false;
            }
        }
        return true;
    }
    if (p == 1) {
        // delta^i(P') must equal c u^{i,1} for one constant c
        bool have_c = false;
        Rational c = 0;
        for (int i = 1; i <= n; ++i) {
            SuperPoly X = variational_derivative_odd(Pp, i, n);
            Rational ci = 0;
            if (!X.is_zero()) {
                if (X.size() != 1) {
                    rep.obstruction = "vector part is not a multiple of u_x";
                    return false;
                }
                const auto& [m, k] = *X.terms().begin();
                Monomial ux;
                ux.even.emplace_back(Var::even(i, 1), Rational(1));
                if (!(m == ux)) {
                    rep.obstruction = "vector part is not a multiple of u_x";
                    return false;
                }
                ci = k;
            }
            if (!have_c) {
                c = ci;
                have_c = true;
            } else if (c != ci) {
                rep.obstruction = "inconsistent Casimir constants";
                return false;
            }
        }
        // any single constant passes: c u^{i,1} theta_i = -c d(zeta) is exact
        rep.casimir_constant = c;
        return true;
    }
    for (int i = 1; i <= n; ++i) {
        if (!variational_derivative_odd(Pp, i, n).is_zero()) {
            rep.obstruction = "nonzero odd variational derivative";
            return false;
        }
    }
    return true;
}

}  // namespace

ZeroTestReport zero_test_report(const SuperPoly& P, int n) {
    ZeroTestReport rep;
    rep.zero = true;
    // decide each super-homogeneous component independently
    int top = 0;
    for (const auto& [m, c] : P.terms())
        top = std::max(top, m.super_degree());
    for (int p = 0; p <= top; ++p) {
        SuperPoly part = P.super_part(p);
        if (part.is_zero()) continue;
        if (!zero_test_component(part, n, rep)) {
            rep.zero = false;
            return rep;
        }
    }
    return rep;
}

bool zero_test(const SuperPoly& P, int n) {
    return zero_test_report(P, n).zero;
}

SuperPoly homotopy_reconstruct(const std::vector<SuperPoly>& gamma, int n) {
    if (static_cast<int>(gamma.size()) != n)
        throw std::runtime_error("homotopy_reconstruct: need n components");
    SuperPoly h;
    for (int i = 1; i <= n; ++i) {
        const SuperPoly& g = gamma[i - 1];
        if (g.super_degree() != 0)
            throw std::runtime_error("gradient components must be even");
        for (const auto& [m, c] : g.terms()) {
            Rational w = 0;
            for (const auto& [v, e] : m.even) {
                if (!is_integer(e) || e < 0)
                    throw PoleAtOrigin("fractional or negative exponent");
                w += e;
            }
            SuperPoly term;
            term.add_term(m, c / (w + 1));
            h += SuperPoly::even_var(i, 0) * term;
        }
    }
    for (int i = 1; i <= n; ++i)
        if (variational_derivative(h, i, n) != gamma[i - 1])
            throw NotClosed("gradient is not closed");
    return h;
}

}  // namespace jacobi
