#include "jacobi/integrable.hpp"

#include <vector>

#include "jacobi/bracket.hpp"
#include "jacobi/varcalc.hpp"

namespace jacobi {

namespace {

SuperPoly scalar_part(const SuperPoly& p) {
    SuperPoly out;
    for (const auto& [m, c] : p.terms())
        if (m.odd.empty()) out.add_term(m, c);
    return out;
}

SuperPoly omega(int n) {
    SuperPoly w;
    for (int i = 1; i <= n; ++i)
        w += SuperPoly::even_var(i, 1) * SuperPoly::odd_var(i, 0);
    return w;
}

// inverse of a constant rational matrix by Gauss-Jordan elimination
std::vector<std::vector<Rational>> rational_inverse(
    std::vector<std::vector<Rational>> m) {
    int n = static_cast<int>(m.size());
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, 0));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (m[r][col] != Rational(0)) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::invalid_argument("eta is not invertible");
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        Rational d = m[col][col];
        for (int c = 0; c < n; ++c) {
            m[col][c] = m[col][c] / d;
            inv[col][c] = inv[col][c] / d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == Rational(0)) continue;
            Rational f = m[r][col];
            for (int c = 0; c < n; ++c) {
                m[r][c] -= f * m[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

// a local representative of a quasi-local 1-vector, or nullopt when the
// zeta part is not an exact total derivative
std::optional<SuperPoly> local_representative(const SuperPoly& X, int n) {
    SuperPoly b = X.partial(Var::zeta());
    SuperPoly a = X - SuperPoly::zeta() * b;
    if (b.is_zero()) return a;
    try {
        return a + omega(n) * invert_total_derivative(b, n);
    } catch (const NotExact&) {
        return std::nullopt;
    }
}

}  // namespace

SuperPoly evolutionary_form(const SuperPoly& X, int n) {
    std::vector<SuperPoly> comp(n);
    long smax = X.max_jet_order();
    for (int i = 0; i < n; ++i)
        for (long s = 0; s <= smax; ++s) {
            SuperPoly c = scalar_part(X.partial(Var::odd(i + 1, (int)s)));
            if (c.is_zero()) continue;
            if (s % 2 == 1) c = -c;
            comp[i] += c.dtotal_pow(s, n);
        }
    // translation kernel: drop a common constant multiple of u^{i,1} theta_i
    Rational c0 = comp[0].partial(Var::even(1, 1)).constant_term();
    bool uniform = true;
    for (int i = 1; i < n; ++i)
        if (comp[i].partial(Var::even(i + 1, 1)).constant_term() != c0)
            uniform = false;
    SuperPoly out;
    for (int i = 0; i < n; ++i) {
        if (uniform && c0 != Rational(0))
            comp[i] -= SuperPoly(c0) * SuperPoly::even_var(i + 1, 1);
        out += comp[i] * SuperPoly::odd_var(i + 1, 0);
    }
    return out;
}

FlowResult hamiltonian_flow(const SuperPoly& P, const SuperPoly& H, int n) {
    if (!H.is_zero() && (H.super_part(0) != H || !H.is_local()))
        throw NonLocalInput("the Hamiltonian must be an even local density");
    FlowResult r;
    r.flow = sn_bracket(P, H, n);
    if (auto rep = local_representative(r.flow, n)) {
        r.local = true;
        r.local_density = evolutionary_form(*rep, n);
    }
    return r;
}

SuperPoly lenard_step(const SuperPoly& P, const SuperPoly& Q,
                      const SuperPoly& Hk, int n) {
    if (!Hk.is_local() || (!Hk.is_zero() && Hk.super_part(0) != Hk))
        throw NonLocalInput("H_k must be an even local density");

    // read the constant metric eta off P and insist on the exact normal form
    std::vector<std::vector<Rational>> eta(n, std::vector<Rational>(n, 0));
    SuperPoly rebuilt;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            SuperPoly a = scalar_part(
                P.partial(Var::odd(i + 1, 0)).partial(Var::odd(j + 1, 1)));
            SuperPoly b = scalar_part(
                P.partial(Var::odd(j + 1, 0)).partial(Var::odd(i + 1, 1)));
            SuperPoly sum = a + b;
            if (sum != SuperPoly(sum.constant_term()))
                throw std::invalid_argument(
                    "P must have a constant metric in normal form");
            eta[i][j] = sum.constant_term();
            rebuilt += SuperPoly(Rational(1, 2) * eta[i][j]) *
                       SuperPoly::odd_var(i + 1, 0) * SuperPoly::odd_var(j + 1, 1);
        }
    if (rebuilt != P)
        throw std::invalid_argument(
            "P must be the density 1/2 theta_i eta^{ij} theta_j^1");
    auto eta_inv = rational_inverse(eta);

    SuperPoly X = sn_bracket(Q, Hk, n);
    auto rep = local_representative(X, n);
    if (!rep) throw NonLocalInput("[Q, H_k] is not a local flow");
    SuperPoly Xev = evolutionary_form(*rep, n);

    // solve -eta^{ij} d(delta_i H) = X^j for the gradient, then reconstruct
    std::vector<SuperPoly> gamma(n);
    for (int i = 0; i < n; ++i) {
        SuperPoly rhs;
        for (int j = 0; j < n; ++j)
            rhs -= SuperPoly(eta_inv[i][j]) *
                   scalar_part(Xev.partial(Var::odd(j + 1, 0)));
        gamma[i] = invert_total_derivative(rhs, n);
    }
    SuperPoly H = homotopy_reconstruct(gamma, n);

    if (!zero_test(sn_bracket(P, H, n) - X, n))
        throw NotClosed("lenard step verification [P, H_{k+1}] = [Q, H_k] failed");
    return H;
}

Hierarchy make_hierarchy(const SuperPoly& P, const SuperPoly& Q,
                         const SuperPoly& H0, int steps, int n) {
    Hierarchy h;
    h.n = n;
    h.P = P;
    h.Q = Q;
    h.H.push_back(H0);
    for (int k = 0; k < steps; ++k)
        h.H.push_back(lenard_step(P, Q, h.H.back(), n));
    for (std::size_t m = 1; m < h.H.size(); ++m) {
        FlowResult fr = hamiltonian_flow(P, h.H[m], n);
        if (!fr.local) throw NonLocalInput("hierarchy flow is not local");
        h.X.push_back(*fr.local_density);
    }
    return h;
}

InvolutionReport verify_involution(const Hierarchy& h) {
    InvolutionReport rep;
    auto fail = [&](const std::string& what) {
        rep.ok = false;
        if (rep.failure.empty()) rep.failure = what;
    };
    for (std::size_t k = 0; k < h.H.size(); ++k)
        for (std::size_t l = k; l < h.H.size(); ++l) {
            if (!zero_test(multivector_evaluate(h.P, {h.H[k], h.H[l]}, h.n), h.n))
                fail("P(H_" + std::to_string(k) + ", H_" + std::to_string(l) +
                     ") != 0");
            if (!zero_test(multivector_evaluate(h.Q, {h.H[k], h.H[l]}, h.n), h.n))
                fail("Q(H_" + std::to_string(k) + ", H_" + std::to_string(l) +
                     ") != 0");
        }
    for (std::size_t k = 0; k < h.X.size(); ++k)
        for (std::size_t l = k + 1; l < h.X.size(); ++l)
            if (!zero_test(sn_bracket(h.X[k], h.X[l], h.n), h.n))
                fail("[X_" + std::to_string(k + 1) + ", X_" +
                     std::to_string(l + 1) + "] != 0");
    return rep;
}

Json hierarchy_to_json(const Hierarchy& h) {
    Json j;
    j["n"] = h.n;
    j["P"] = h.P.str();
    j["Q"] = h.Q.str();
    Json hs = Json::array(), xs = Json::array();
    for (const auto& d : h.H) hs.push_back(d.str());
    for (const auto& d : h.X) xs.push_back(d.str());
    j["H"] = hs;
    j["X"] = xs;
    return j;
}

Hierarchy hierarchy_from_json(const Json& j) {
    Hierarchy h;
    h.n = j.at("n").get<int>();
    h.P = parse_expression(j.at("P").get<std::string>(), h.n);
    h.Q = parse_expression(j.at("Q").get<std::string>(), h.n);
    for (const auto& s : j.at("H"))
        h.H.push_back(parse_expression(s.get<std::string>(), h.n));
    for (const auto& s : j.at("X"))
        h.X.push_back(parse_expression(s.get<std::string>(), h.n));
    return h;
}

}  // namespace jacobi
