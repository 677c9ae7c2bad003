#include "jacobi/geometry.hpp"

#include <string>

#include "jacobi/bracket.hpp"
#include "jacobi/varcalc.hpp"

namespace jacobi {

namespace {

const Rational kHalf = Rational(1) / Rational(2);

// part of p free of odd factors (theta and zeta)
SuperPoly scalar_part(const SuperPoly& p) {
    SuperPoly out;
    for (const auto& [m, c] : p.terms())
        if (m.odd.empty()) out.add_term(m, c);
    return out;
}

SuperPoly omega(int n) {  // u^{i,1} theta_i
    SuperPoly w;
    for (int i = 1; i <= n; ++i)
        w += SuperPoly::even_var(i, 1) * SuperPoly::odd_var(i, 0);
    return w;
}

Var u0(int k) { return Var::even(k, 0); }

RatMatrix rat_zero(int n) {
    return RatMatrix(n, std::vector<RationalFunction>(n));
}

}  // namespace

SuperPoly HydroStructure::det_g() const { return poly_det(g); }

RatMatrix HydroStructure::g_lower() const {
    try {
        return poly_matrix_inverse(g);
    } catch (const DivisionByZero&) {
        throw DegenerateMetric("metric determinant vanishes identically");
    }
}

Rat3 HydroStructure::christoffel() const {
    RatMatrix gl = g_lower();
    Rat3 ch(n, rat_zero(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                RationalFunction s;
                for (int i = 0; i < n; ++i)
                    s += gl[k][i] * RationalFunction(Gamma[i][j][l]);
                ch[j][k][l] = -s;
            }
    return ch;
}

RatMatrix HydroStructure::v_lower() const {
    RatMatrix gl = g_lower();
    RatMatrix vl = rat_zero(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            RationalFunction s;
            for (int i = 0; i < n; ++i)
                s += gl[k][i] * RationalFunction(V[i][j]);
            vl[k][j] = s;
        }
    return vl;
}

SuperPoly hydro_bivector(const HydroStructure& h) {
    SuperPoly d;
    for (int i = 0; i < h.n; ++i)
        for (int j = 0; j < h.n; ++j) {
            d += kHalf * h.g[i][j] * SuperPoly::odd_var(i + 1, 0) *
                 SuperPoly::odd_var(j + 1, 1);
            for (int k = 0; k < h.n; ++k)
                d += kHalf * h.Gamma[i][j][k] * SuperPoly::even_var(k + 1, 1) *
                     SuperPoly::odd_var(i + 1, 0) * SuperPoly::odd_var(j + 1, 0);
        }
    for (int i = 0; i < h.n; ++i)
        for (int k = 0; k < h.n; ++k)
            d += SuperPoly::zeta() * h.V[i][k] * SuperPoly::even_var(k + 1, 1) *
                 SuperPoly::odd_var(i + 1, 0);
    return d;
}

HydroStructure extract_hydro(const SuperPoly& P, int n) {
    if (P.is_zero() || P.super_part(2) != P)
        throw NotHydrodynamic("expected a nonzero super-degree-2 density");

    SuperPoly X = P.partial(Var::zeta());
    SuperPoly X1 = X.degree_part(1);
    SuperPoly lead = P.degree_part(1);
    SuperPoly d1 = lead - SuperPoly::zeta() * X1;

    // theta^1 terms of the zeta part: zeta d(e_i theta_i) ~ omega e_i theta_i
    // shifts the local density while the flow part becomes evolutionary
    std::vector<SuperPoly> e(n);
    SuperPoly Y;
    for (int i = 0; i < n; ++i) {
        e[i] = scalar_part(X1.partial(Var::odd(i + 1, 1)));
        Y += e[i] * SuperPoly::odd_var(i + 1, 0);
    }
    SuperPoly d1n = d1 + omega(n) * Y;

    HydroStructure h;
    h.n = n;
    h.g = PolyMatrix(n, std::vector<SuperPoly>(n));
    h.V = PolyMatrix(n, std::vector<SuperPoly>(n));
    h.Gamma = Poly3(n, PolyMatrix(n, std::vector<SuperPoly>(n)));

    PolyMatrix a(n, std::vector<SuperPoly>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[i][j] = scalar_part(
                d1n.partial(Var::odd(i + 1, 0)).partial(Var::odd(j + 1, 1)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h.g[i][j] = a[i][j] + a[j][i];

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                SuperPoly sym = kHalf * h.g[i][j].partial(u0(k + 1));
                if (i == j) {
                    h.Gamma[i][j][k] = sym;
                    continue;
                }
                int lo = std::min(i, j), hi = std::max(i, j);
                SuperPoly C = scalar_part(d1n.partial(Var::even(k + 1, 1))
                                              .partial(Var::odd(lo + 1, 0))
                                              .partial(Var::odd(hi + 1, 0)));
                SuperPoly w = kHalf * (a[lo][hi] - a[hi][lo]);
                SuperPoly anti = C - w.partial(u0(k + 1));
                h.Gamma[i][j][k] = (i < j) ? sym + anti : sym - anti;
            }

    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            SuperPoly c = scalar_part(
                X1.partial(Var::even(k + 1, 1)).partial(Var::odd(i + 1, 0)));
            h.V[i][k] = c - e[i].partial(u0(k + 1));
        }

    if (h.det_g().is_zero())
        throw DegenerateMetric("metric determinant vanishes identically");
    if (!zero_test(lead - hydro_bivector(h), n))
        throw NotHydrodynamic("degree-1 part does not normalize to hydrodynamic form");
    return h;
}

CurvatureReport curvature(const HydroStructure& h) {
    int n = h.n;
    RatMatrix gl = h.g_lower();
    Rat3 ch = h.christoffel();

    // R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
    Rat4 upper(n, Rat3(n, rat_zero(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    RationalFunction r = ch[i][l][j].partial(u0(k + 1)) -
                                         ch[i][k][j].partial(u0(l + 1));
                    for (int m = 0; m < n; ++m)
                        r += ch[i][k][m] * ch[m][l][j] -
                             ch[i][l][m] * ch[m][k][j];
                    upper[i][j][k][l] = r;
                }

    CurvatureReport rep;
    rep.riemann = Rat4(n, Rat3(n, rat_zero(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    RationalFunction r;
                    for (int m = 0; m < n; ++m)
                        r += gl[i][m] * upper[m][j][k][l];
                    rep.riemann[i][j][k][l] = r;
                }

    rep.ricci = rat_zero(n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            RationalFunction r;
            for (int k = 0; k < n; ++k) r += upper[k][j][k][l];
            rep.ricci[j][l] = r;
        }
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            rep.scalar += RationalFunction(h.g[j][l]) * rep.ricci[j][l];

    rep.weyl = Rat4(n, Rat3(n, rat_zero(n)));
    rep.cotton = Rat3(n, rat_zero(n));
    if (n >= 3) {
        // Schouten tensor S = (Ric - R g /(2(n-1))) / (n-2)
        RatMatrix S = rat_zero(n);
        RationalFunction inv_nm2 = RationalFunction(Rational(1) / Rational(n - 2));
        RationalFunction half_nm1 =
            RationalFunction(Rational(1) / Rational(2 * (n - 1)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                S[i][j] = inv_nm2 *
                          (rep.ricci[i][j] - half_nm1 * rep.scalar * gl[i][j]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        rep.weyl[i][j][k][l] =
                            rep.riemann[i][j][k][l] -
                            (gl[i][k] * S[j][l] - gl[i][l] * S[j][k] +
                             gl[j][l] * S[i][k] - gl[j][k] * S[i][l]);
        auto nabla_S = [&](int k, int i, int j) {
            RationalFunction r = S[i][j].partial(u0(k + 1));
            for (int m = 0; m < n; ++m)
                r -= ch[m][k][i] * S[m][j] + ch[m][k][j] * S[i][m];
            return r;
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    rep.cotton[i][j][k] = nabla_S(k, i, j) - nabla_S(j, i, k);
    }
    return rep;
}

FeraReport check_fera(const HydroStructure& h) {
    int n = h.n;
    Rat3 ch = h.christoffel();
    RatMatrix gl = h.g_lower();
    RatMatrix vl = h.v_lower();
    FeraReport rep;

    rep.gamma_symmetric = true;
    for (int j = 0; j < n && rep.gamma_symmetric; ++j)
        for (int k = 0; k < n && rep.gamma_symmetric; ++k)
            for (int l = k + 1; l < n; ++l)
                if (ch[j][k][l] != ch[j][l][k]) {
                    rep.gamma_symmetric = false;
                    break;
                }

    rep.v_symmetric = true;
    for (int k = 0; k < n && rep.v_symmetric; ++k)
        for (int j = k + 1; j < n; ++j)
            if (vl[k][j] != vl[j][k]) {
                rep.v_symmetric = false;
                break;
            }

    auto nabla_v = [&](int k, int l, int j) {
        RationalFunction r = vl[l][j].partial(u0(k + 1));
        for (int m = 0; m < n; ++m)
            r -= ch[m][k][l] * vl[m][j] + ch[m][k][j] * vl[l][m];
        return r;
    };
    rep.codazzi = true;
    for (int k = 0; k < n && rep.codazzi; ++k)
        for (int l = k + 1; l < n && rep.codazzi; ++l)
            for (int j = 0; j < n; ++j)
                if (nabla_v(k, l, j) != nabla_v(l, k, j)) {
                    rep.codazzi = false;
                    break;
                }
    if (n == 1) {
        // the l = k Codazzi component is the only one in one dimension
        rep.codazzi = true;
    }

    CurvatureReport cur = curvature(h);
    rep.curvature_form = true;
    for (int i = 0; i < n && rep.curvature_form; ++i)
        for (int j = 0; j < n && rep.curvature_form; ++j)
            for (int k = 0; k < n && rep.curvature_form; ++k)
                for (int l = 0; l < n; ++l) {
                    RationalFunction want =
                        gl[i][k] * vl[j][l] + gl[j][l] * vl[i][k] -
                        gl[j][k] * vl[i][l] - gl[i][l] * vl[j][k];
                    if (cur.riemann[i][j][k][l] != want) {
                        rep.curvature_form = false;
                        break;
                    }
                }
    return rep;
}

SuperPoly ab_tensor(const SuperPoly& P, int i, int j, int m, int n) {
    SuperPoly d = variational_derivative_odd(P, i, n);
    return scalar_part(d.partial(Var::odd(j, m))).degree_part(0);
}

Rational nonlocal_charge(const SuperPoly& P, const SuperPoly& rho, int n) {
    HydroStructure h = extract_hydro(P, n);
    if (!zero_test(sn_bracket(P, rho, n), n))
        throw NotConserved("rho is not a conserved density of the structure");

    SuperPoly X = P.partial(Var::zeta());
    SuperPoly rhs;
    long smax = rho.max_jet_order();
    for (int i = 1; i <= n; ++i) {
        SuperPoly di = variational_derivative_odd(X, i, n);
        for (long s = 0; s <= smax; ++s)
            rhs += di.dtotal_pow(s, n) * rho.partial(Var::even(i, (int)s));
    }
    SuperPoly sigma;
    try {
        sigma = invert_total_derivative(rhs, n);
    } catch (const NotExact&) {
        throw NotConserved("sigma equation d(sigma) = d^s(delta^i X) d_{i,s}(rho) "
                           "has no local solution");
    }
    SuperPoly rho0 = rho.degree_part(0);
    SuperPoly sigma0 = sigma.degree_part(0);

    RatMatrix gl = h.g_lower();
    Rat3 ch = h.christoffel();
    // M^i_k = D^i D_k rho_0 + rho_0 V^i_k + sigma_0 delta^i_k
    RatMatrix M = rat_zero(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            RationalFunction hess;
            for (int j = 0; j < n; ++j) {
                RationalFunction dd =
                    RationalFunction(rho0.partial(u0(j + 1)).partial(u0(k + 1)));
                for (int m = 0; m < n; ++m)
                    dd -= ch[m][j][k] * RationalFunction(rho0.partial(u0(m + 1)));
                hess += RationalFunction(h.g[i][j]) * dd;
            }
            M[i][k] = hess + RationalFunction(rho0 * h.V[i][k]);
            if (i == k) M[i][k] += RationalFunction(sigma0);
        }
    RationalFunction c_rf;
    for (int i = 0; i < n; ++i) c_rf += M[i][i];
    c_rf = c_rf * RationalFunction(Rational(1) / Rational(n));
    auto c = c_rf.as_constant();
    if (!c)
        throw NonConstantCharge("trace of the charge equation is not constant: " +
                                c_rf.str());
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            RationalFunction want = (i == k) ? c_rf : RationalFunction();
            if (M[i][k] != want)
                throw NonConstantCharge(
                    "charge equation entry (" + std::to_string(i + 1) + "," +
                    std::to_string(k + 1) + ") is not c delta^i_k: " +
                    M[i][k].str());
        }

    // z = 1/2 g^{lm} d_l(rho_0) d_m(rho_0) + rho_0 (sigma_0 - c)
    RationalFunction z = RationalFunction(rho0 * sigma0) -
                         RationalFunction(rho0) * RationalFunction(*c);
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
            z += RationalFunction(kHalf) *
                 RationalFunction(h.g[l][m] * rho0.partial(u0(l + 1)) *
                                  rho0.partial(u0(m + 1)));
    auto zc = z.as_constant();
    if (!zc) throw NonConstantCharge("charge is not constant: " + z.str());
    return *zc;
}

LocalityWitness check_locality(const SuperPoly& P, const SuperPoly& rho, int n,
                               const TruncationPolicy& pol) {
    int p = P.super_degree();
    if (p < 0)
        throw std::invalid_argument("check_locality needs a super-homogeneous density");

    LocalityWitness w;
    if (!zero_test(sn_bracket(P, rho, n), n)) {
        w.local = false;
        return w;
    }
    if (p == 2) {
        Rational z = nonlocal_charge(P, rho, n);
        w.charge = z;
        if (z != Rational(0)) {
            w.local = false;
            return w;
        }
    }
    w.local = true;

    ReciprocalMap r = make_reciprocal(n, rho);
    SuperPoly Pt = reciprocal_transform(P, r, pol);
    SuperPoly b = Pt.partial(Var::zeta());
    SuperPoly a = Pt - SuperPoly::zeta() * b;
    if (b.is_zero()) {
        w.density = a;
        return w;
    }
    SuperPoly Y = invert_total_derivative(b, n);  // zeta d(Y) ~ u^{i,1} theta_i Y
    SuperPoly dens = a + omega(n) * Y;
    if (!zero_test(Pt - dens, n))
        throw std::logic_error("locality witness failed verification");
    w.density = dens;
    return w;
}

CentralInvariantReport central_invariants(const SuperPoly& P, const SuperPoly& Q,
                                          int n) {
    CentralInvariantReport rep;
    rep.n = n;
    rep.A.assign(n, std::vector<std::array<SuperPoly, 4>>(n));
    rep.B.assign(n, std::vector<std::array<SuperPoly, 4>>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int m = 0; m <= 3; ++m) {
                rep.A[i][j][m] = ab_tensor(P, i + 1, j + 1, m, n);
                rep.B[i][j][m] = ab_tensor(Q, i + 1, j + 1, m, n);
            }

    // eigenvalues lambda_i = g_2^{ii}/g_1^{ii} and derivatives L_i of the
    // canonical coordinate change; the symbol tensors rescale as
    // A~^{ij}_m = L_i L_j A^{ij}_m in canonical coordinates
    std::vector<RationalFunction> L(n), f0(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!rep.A[i][j][1].is_zero() || !rep.B[i][j][1].is_zero())
                throw MissingCoordinates(
                    "metrics are not diagonal; supply the pair in canonical "
                    "coordinates");
        }
        if (rep.A[i][i][1].is_zero())
            throw NotSemisimple("metric entry g_1^{" + std::to_string(i + 1) +
                                std::to_string(i + 1) + "} vanishes");
        f0[i] = RationalFunction(rep.A[i][i][1]);
        RationalFunction lam =
            RationalFunction(rep.B[i][i][1]) / f0[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (!lam.partial(u0(j + 1)).is_zero())
                throw MissingCoordinates(
                    "eigenvalue lambda_" + std::to_string(i + 1) +
                    " depends on u^" + std::to_string(j + 1) +
                    "; supply canonical coordinates");
        }
        L[i] = lam.partial(u0(i + 1));
        if (L[i].is_zero())
            throw NotSemisimple("eigenvalue lambda_" + std::to_string(i + 1) +
                                " is constant");
        rep.lambda.push_back(lam);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rep.lambda[i] == rep.lambda[j])
                throw NotSemisimple("coinciding eigenvalues lambda_" +
                                    std::to_string(i + 1) + " = lambda_" +
                                    std::to_string(j + 1));

    auto At = [&](int i, int j, int m) {
        return L[i] * L[j] * RationalFunction(rep.A[i][j][m]);
    };
    auto Bt = [&](int i, int j, int m) {
        return L[i] * L[j] * RationalFunction(rep.B[i][j][m]);
    };
    std::vector<RationalFunction> f(n);
    for (int i = 0; i < n; ++i) f[i] = L[i] * L[i] * f0[i];
    rep.f = f;

    for (int i = 0; i < n; ++i) {
        RationalFunction num = Bt(i, i, 3) - rep.lambda[i] * At(i, i, 3);
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            RationalFunction d = Bt(k, i, 2) - rep.lambda[i] * At(k, i, 2);
            num += d * d / (f[k] * (rep.lambda[k] - rep.lambda[i]));
        }
        RationalFunction ci = num / (RationalFunction(Rational(3)) * f[i] * f[i]);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (!ci.partial(u0(j + 1)).is_zero())
                throw std::logic_error("central invariant c_" +
                                       std::to_string(i + 1) +
                                       " depends on a foreign coordinate");
        }
        rep.c.push_back(ci);
    }
    return rep;
}

Json hydro_to_json(const HydroStructure& h) {
    Json j;
    j["n"] = h.n;
    Json g = Json::array(), G = Json::array(), V = Json::array();
    for (int i = 0; i < h.n; ++i) {
        Json gr = Json::array(), Vr = Json::array(), Gr = Json::array();
        for (int k = 0; k < h.n; ++k) {
            gr.push_back(h.g[i][k].str());
            Vr.push_back(h.V[i][k].str());
            Json Gik = Json::array();
            for (int l = 0; l < h.n; ++l) Gik.push_back(h.Gamma[i][k][l].str());
            Gr.push_back(Gik);
        }
        g.push_back(gr);
        V.push_back(Vr);
        G.push_back(Gr);
    }
    j["g"] = g;
    j["Gamma"] = G;
    j["V"] = V;
    return j;
}

HydroStructure hydro_from_json(const Json& j) {
    HydroStructure h;
    h.n = j.at("n").get<int>();
    h.g.assign(h.n, std::vector<SuperPoly>(h.n));
    h.V.assign(h.n, std::vector<SuperPoly>(h.n));
    h.Gamma.assign(h.n, PolyMatrix(h.n, std::vector<SuperPoly>(h.n)));
    for (int i = 0; i < h.n; ++i)
        for (int k = 0; k < h.n; ++k) {
            h.g[i][k] = parse_expression(j.at("g")[i][k].get<std::string>());
            h.V[i][k] = parse_expression(j.at("V")[i][k].get<std::string>());
            for (int l = 0; l < h.n; ++l)
                h.Gamma[i][k][l] =
                    parse_expression(j.at("Gamma")[i][k][l].get<std::string>());
        }
    return h;
}

}  // namespace jacobi
