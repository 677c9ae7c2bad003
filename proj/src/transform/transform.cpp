#include "jacobi/transform.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "jacobi/bracket.hpp"
#include "jacobi/varcalc.hpp"

namespace jacobi {

SuperPoly truncate_degree(const SuperPoly& p, const TruncationPolicy& pol) {
    SuperPoly r;
    bool dropped = false;
    for (const auto& [d, part] : p.degree_decompose()) {
        if (d <= pol.max_degree)
            r += part;
        else
            dropped = true;
    }
    if (dropped && pol.error_on_overflow)
        throw TruncationOverflow("series term exceeds the truncation degree");
    return r;
}

// ---------------------------------------------------------------------------
// Miura type transformations
// ---------------------------------------------------------------------------

namespace {

// determinant by Laplace expansion along the first row (n is small)
SuperPoly poly_det(const std::vector<std::vector<SuperPoly>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    SuperPoly det;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<SuperPoly>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<SuperPoly> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        SuperPoly cof = m[0][j] * poly_det(minor);
        det += (j % 2) ? -cof : cof;
    }
    return det;
}

void validate_miura(const MiuraMap& m) {
    if (static_cast<int>(m.images.size()) != m.n)
        throw std::runtime_error("miura map needs n images");
    for (const auto& f : m.images) {
        if (f.is_zero() || f.super_degree() != 0 || !f.is_local())
            throw std::runtime_error("miura images must be even and local");
    }
    if (miura_jacobian_det(m).is_zero())
        throw SingularJacobian("degree-0 Jacobian of the map is singular");
}

}  // namespace

bool MiuraMap::first_kind() const {
    for (const auto& f : images)
        if (f.max_jet_order() > 0) return false;
    return true;
}

bool MiuraMap::second_kind() const {
    for (int j = 1; j <= n; ++j)
        if (images[j - 1].degree_part(0) != SuperPoly::even_var(j, 0))
            return false;
    return true;
}

SuperPoly miura_jacobian_det(const MiuraMap& m) {
    std::vector<std::vector<SuperPoly>> jac(m.n, std::vector<SuperPoly>(m.n));
    for (int j = 1; j <= m.n; ++j) {
        SuperPoly lead = m.images[j - 1].degree_part(0);
        for (int i = 1; i <= m.n; ++i)
            jac[j - 1][i - 1] = lead.partial(Var::even(i, 0));
    }
    return poly_det(jac);
}

MiuraMap make_miura(int n, std::vector<SuperPoly> images) {
    MiuraMap m{n, std::move(images), {}};
    validate_miura(m);
    return m;
}

MiuraMap make_miura(int n, std::vector<SuperPoly> images,
                    std::vector<SuperPoly> inverse) {
    MiuraMap m{n, std::move(images), std::move(inverse)};
    validate_miura(m);
    if (static_cast<int>(m.inverse.size()) != n)
        throw std::runtime_error("miura inverse needs n components");
    std::map<int, SuperPoly> g;
    for (int i = 1; i <= n; ++i) g.emplace(i, m.inverse[i - 1]);
    for (int j = 1; j <= n; ++j) {
        // F^j(G(ubar)) must reproduce the j-th barred coordinate
        if (m.images[j - 1].substitute_even(g) != SuperPoly::even_var(j, 0))
            throw std::runtime_error("miura inverse does not invert the map");
    }
    return m;
}

SuperPoly miura_pullback(const SuperPoly& beta, const MiuraMap& m) {
    std::map<int, SuperPoly> f;
    for (int j = 1; j <= m.n; ++j) f.emplace(j, m.images[j - 1]);
    return beta.substitute_even(f);
}

namespace {

// the odd-variable images of Phi-bar, in the mixed presentation
SuperPoly miura_theta_base(const MiuraMap& m, int i) {
    SuperPoly base;
    for (int j = 1; j <= m.n; ++j) {
        const SuperPoly& F = m.images[j - 1];
        long top = F.max_jet_order();
        for (long t = 0; t <= top; ++t) {
            SuperPoly g = F.partial(Var::even(i, static_cast<int>(t)));
            if (g.is_zero()) continue;
            SuperPoly term = (g * SuperPoly::odd_var(j, 0)).dtotal_pow(t);
            base += (t % 2) ? -term : term;
        }
    }
    return base;
}

SuperPoly miura_zeta_image(const MiuraMap& m) {
    SuperPoly z = SuperPoly::zeta();
    for (int j = 1; j <= m.n; ++j) {
        const SuperPoly& F = m.images[j - 1];
        long top = F.max_jet_order();
        for (int i = 1; i <= m.n; ++i) {
            for (long a = 1; a <= top; ++a) {
                for (long s = 0; s + a <= top; ++s) {
                    SuperPoly g = F.partial(Var::even(i, static_cast<int>(s + a)));
                    if (g.is_zero()) continue;
                    SuperPoly term = SuperPoly::even_var(i, static_cast<int>(a)) *
                                     (g * SuperPoly::odd_var(j, 0)).dtotal_pow(s);
                    z += (s % 2) ? -term : term;
                }
            }
        }
    }
    return z;
}

// Phi-bar with the output odd variables renamed back into the single family
SuperPoly miura_phi(const SuperPoly& alpha, const MiuraMap& m) {
    std::set<Var> odd_present;
    for (const auto& [mono, c] : alpha.terms())
        for (const auto& v : mono.odd) odd_present.insert(v);
    if (odd_present.empty()) return alpha;

    std::map<int, SuperPoly> bases;
    SuperPoly::Substitution sub;
    for (const auto& v : odd_present) {
        if (v.kind == VarKind::Zeta) {
            sub.images.emplace(v, miura_zeta_image(m));
        } else {
            auto it = bases.find(v.i);
            if (it == bases.end())
                it = bases.emplace(v.i, miura_theta_base(m, v.i)).first;
            sub.images.emplace(v, it->second.dtotal_pow(v.s));
        }
    }
    return alpha.substitute(sub);
}

// sum_j d(F^j) theta_j -- the image of -d(zeta) in the mixed presentation
SuperPoly miura_omega(const MiuraMap& m) {
    SuperPoly w;
    for (int j = 1; j <= m.n; ++j)
        w += m.images[j - 1].dtotal() * SuperPoly::odd_var(j, 0);
    return w;
}

bool plain_exact(const SuperPoly& f, int n) {
    if (f.is_zero()) return true;
    try {
        invert_total_derivative(f, n);
        return true;
    } catch (const NotExact&) {
        return false;
    }
}

// exactness in the quotient by the mixed extended derivative, whose zeta term
// is -(sum_j d(F^j) theta_j) d_zeta
bool mixed_exact(const SuperPoly& d, const MiuraMap& m) {
    if (d.is_zero()) return true;
    SuperPoly omega = miura_omega(m);
    int top = 0;
    for (const auto& [mono, c] : d.terms())
        top = std::max(top, mono.super_degree());
    for (int p = 0; p <= top; ++p) {
        SuperPoly part = d.super_part(p);
        if (part.is_zero()) continue;
        SuperPoly b = part.partial(Var::zeta());
        SuperPoly dp = part - SuperPoly::zeta() * b;
        if (!b.is_zero()) {
            SuperPoly q;
            try {
                q = invert_total_derivative(b, m.n);
            } catch (const NotExact&) {
                return false;
            }
            // zeta d(Q) ~ omega Q since the mixed derivative sends zeta to -omega
            dp += omega * q;
        }
        if (dp.is_zero()) continue;
        if (dp.super_degree() == 1) {
            // allow a constant multiple of omega: it is (minus) the mixed
            // derivative of zeta, hence exact
            Rational c = 0;
            bool have = false;
            bool bad = false;
            for (int j = 1; j <= m.n && !bad; ++j) {
                SuperPoly xj = variational_derivative_odd(dp, j, m.n);
                SuperPoly fj = m.images[j - 1].dtotal();
                if (xj.is_zero()) {
                    if (have && c != 0 && !fj.is_zero()) bad = true;
                    if (!have && !fj.is_zero()) {
                        c = 0;
                        have = true;
                    }
                    continue;
                }
                if (fj.is_zero()) {
                    bad = true;
                    break;
                }
                // candidate ratio from the leading terms, then verified
                const auto& [mx, cx] = *xj.terms().begin();
                const auto& [mf, cf] = *fj.terms().begin();
                Rational cand = cx / cf;
                if (!(mx == mf) || !(xj == fj * cand)) {
                    bad = true;
                    break;
                }
                if (have && cand != c) bad = true;
                c = cand;
                have = true;
            }
            if (bad) return false;
            if (!plain_exact(dp - c * omega, m.n)) return false;
        } else {
            if (!plain_exact(dp, m.n)) return false;
        }
    }
    return true;
}

}  // namespace

SuperPoly miura_transform(const SuperPoly& alpha, const MiuraMap& m) {
    SuperPoly r = miura_phi(alpha, m);
    if (!m.inverse.empty()) {
        std::map<int, SuperPoly> g;
        for (int i = 1; i <= m.n; ++i) g.emplace(i, m.inverse[i - 1]);
        r = r.substitute_even(g);
    }
    return r;
}

bool miura_matches(const SuperPoly& alpha, const SuperPoly& beta,
                   const MiuraMap& m) {
    return mixed_exact(miura_phi(alpha, m) - miura_pullback(beta, m), m);
}

SuperPoly exp_ad(const SuperPoly& X, const SuperPoly& alpha, int n,
                 const TruncationPolicy& pol) {
    if (X.super_degree() != 1)
        throw std::runtime_error("exp_ad generator must be a 1-vector");
    auto nu = X.nu();
    if (!nu || *nu < 1)
        throw std::runtime_error("exp_ad generator must have positive degree");
    SuperPoly acc = truncate_degree(alpha, pol);
    SuperPoly term = acc;
    Rational fact = 1;
    for (long k = 1; !term.is_zero(); ++k) {
        if (k > pol.max_degree + 1)
            throw std::logic_error("exp_ad series failed to terminate");
        term = truncate_degree(sn_bracket(X, term, n), pol);
        fact *= k;
        acc += term * (Rational(1) / fact);
    }
    return acc;
}

SuperPoly miura_second_kind(const SuperPoly& alpha, const SuperPoly& X, int n,
                            const TruncationPolicy& pol) {
    if (X.super_degree() != 1 || !X.is_local())
        throw std::runtime_error("second-kind generator must be a local 1-vector");
    return exp_ad(-X, alpha, n, pol);
}

// ---------------------------------------------------------------------------
// reciprocal transformations
// ---------------------------------------------------------------------------

ReciprocalMap make_reciprocal(int n, const SuperPoly& rho) {
    if (rho.is_zero() || rho.super_degree() != 0 || !rho.is_local())
        throw NonInvertibleRho("rho must be a nonzero even local density");
    SuperPoly lead = rho.degree_part(0);
    if (lead.size() != 1)
        throw NonInvertibleRho(
            "degree-0 part of rho must be a single invertible monomial");
    const auto& [mono, c] = *lead.terms().begin();
    SuperPoly inv(Rational(1) / c);
    for (const auto& [v, e] : mono.even)
        inv *= SuperPoly::even_pow(v.i, 0, -e);
    bool first = rho.max_diff_degree() == 0;
    return ReciprocalMap{n, rho, inv, first};
}

namespace {

// All rewrite data for one transformation: rho, its inverse and the original
// jet variables expressed in the tilde presentation.
struct TildeRewrite {
    const ReciprocalMap& r;
    TruncationPolicy pol;
    bool exact;  // first kind: no truncation anywhere
    SuperPoly rho_t, rho_t_inv;
    std::map<std::pair<int, int>, SuperPoly> jets;  // (i,s) with s >= 1

    SuperPoly trunc(const SuperPoly& p) const {
        return exact ? p : truncate_degree(p, pol);
    }

    // substitute the stored jet images into a source-presentation element
    SuperPoly rewrite(const SuperPoly& f) const {
        SuperPoly::Substitution sub;
        for (const auto& [key, img] : jets)
            sub.images.emplace(Var::even(key.first, key.second), img);
        return trunc(f.substitute(sub));
    }
};

// geometric series (1 + h)^{-1} truncated at the policy degree
SuperPoly geometric_inverse(const SuperPoly& h, const TruncationPolicy& pol) {
    SuperPoly acc(Rational(1));
    SuperPoly pw(Rational(1));
    for (long k = 1; k <= pol.max_degree; ++k) {
        pw = truncate_degree(pw * (-h), TruncationPolicy{pol.max_degree, false});
        if (pw.is_zero()) break;
        acc += pw;
    }
    return acc;
}

TildeRewrite build_rewrite(const ReciprocalMap& r, long max_order,
                           const TruncationPolicy& pol) {
    TildeRewrite tw{r, pol, r.first_kind, {}, {}, {}};
    long need = std::max(max_order, r.rho.max_jet_order());
    if (tw.exact) {
        tw.rho_t = r.rho;
        tw.rho_t_inv = r.rho0_inv;
        for (int i = 1; i <= r.n; ++i) {
            SuperPoly cur = SuperPoly::even_var(i, 0);
            for (long s = 1; s <= need; ++s) {
                cur = tw.rho_t * cur.dtotal();
                tw.jets.emplace(std::make_pair(i, static_cast<int>(s)), cur);
            }
        }
        return tw;
    }
    // general kind: solve the triangular system by degree-stable iteration
    for (int i = 1; i <= r.n; ++i)
        for (long s = 1; s <= need; ++s)
            tw.jets.emplace(std::make_pair(i, static_cast<int>(s)),
                            SuperPoly::even_var(i, static_cast<int>(s)));
    for (long iter = 0; iter <= pol.max_degree + 1; ++iter) {
        SuperPoly rho_t = tw.rewrite(r.rho);
        SuperPoly h = r.rho0_inv * rho_t - SuperPoly(Rational(1));
        std::map<std::pair<int, int>, SuperPoly> next;
        for (int i = 1; i <= r.n; ++i) {
            SuperPoly cur = SuperPoly::even_var(i, 0);
            for (long s = 1; s <= need; ++s) {
                cur = tw.trunc(rho_t * cur.dtotal());
                next.emplace(std::make_pair(i, static_cast<int>(s)), cur);
            }
        }
        bool stable = tw.rho_t == rho_t && tw.jets == next;
        tw.rho_t = rho_t;
        tw.rho_t_inv = tw.trunc(r.rho0_inv * geometric_inverse(h, pol));
        tw.jets = std::move(next);
        if (stable) break;
    }
    return tw;
}

// apply (rho d~) k times with the full extended tilde derivative
SuperPoly rho_d(const TildeRewrite& tw, SuperPoly f, long k, int n) {
    for (long j = 0; j < k; ++j) f = tw.trunc(tw.rho_t * f.dtotal(n));
    return f;
}

SuperPoly phi_hat_theta_base(const TildeRewrite& tw, int i) {
    const ReciprocalMap& r = tw.r;
    SuperPoly base = tw.rho_t * SuperPoly::odd_var(i, 0);
    long top = r.rho.max_jet_order();
    for (long t = 0; t <= top; ++t) {
        SuperPoly g = r.rho.partial(Var::even(i, static_cast<int>(t)));
        if (g.is_zero()) continue;
        SuperPoly term =
            rho_d(tw, tw.rewrite(g) * SuperPoly::zeta(), t, r.n);
        base -= (t % 2) ? -term : term;
    }
    return base;
}

SuperPoly phi_hat_zeta(const TildeRewrite& tw) {
    const ReciprocalMap& r = tw.r;
    SuperPoly z = tw.rho_t * SuperPoly::zeta();
    long top = r.rho.max_jet_order();
    for (int i = 1; i <= r.n; ++i) {
        for (long a = 1; a <= top; ++a) {
            SuperPoly ua = tw.jets.at(std::make_pair(i, static_cast<int>(a)));
            for (long s = 0; s + a <= top; ++s) {
                SuperPoly g = r.rho.partial(Var::even(i, static_cast<int>(s + a)));
                if (g.is_zero()) continue;
                SuperPoly term =
                    ua * rho_d(tw, tw.rewrite(g) * SuperPoly::zeta(), s, r.n);
                z -= (s % 2) ? -term : term;
            }
        }
    }
    return z;
}

}  // namespace

SuperPoly reciprocal_jet_rewrite(const ReciprocalMap& r, int i, int s,
                                 const TruncationPolicy& pol) {
    if (s == 0) return SuperPoly::even_var(i, 0);
    TildeRewrite tw = build_rewrite(r, s, pol);
    return tw.jets.at(std::make_pair(i, s));
}

SuperPoly reciprocal_rho_tilde(const ReciprocalMap& r,
                               const TruncationPolicy& pol) {
    return build_rewrite(r, 0, pol).rho_t;
}

SuperPoly reciprocal_rho_tilde_inv(const ReciprocalMap& r,
                                   const TruncationPolicy& pol) {
    return build_rewrite(r, 0, pol).rho_t_inv;
}

SuperPoly reciprocal_transform(const SuperPoly& alpha, const ReciprocalMap& r,
                               const TruncationPolicy& pol) {
    long max_order = alpha.max_jet_order();
    TildeRewrite tw = build_rewrite(r, max_order, pol);

    // even part of the rewrite
    SuperPoly a = tw.rewrite(alpha);

    // odd images
    std::set<Var> odd_present;
    for (const auto& [mono, c] : a.terms())
        for (const auto& v : mono.odd) odd_present.insert(v);
    if (!odd_present.empty()) {
        std::map<int, SuperPoly> bases;
        SuperPoly::Substitution sub;
        for (const auto& v : odd_present) {
            if (v.kind == VarKind::Zeta) {
                sub.images.emplace(v, phi_hat_zeta(tw));
            } else {
                auto it = bases.find(v.i);
                if (it == bases.end())
                    it = bases.emplace(v.i, phi_hat_theta_base(tw, v.i)).first;
                sub.images.emplace(v, rho_d(tw, it->second, v.s, r.n));
            }
        }
        a = tw.trunc(a.substitute(sub));
    }
    return tw.trunc(tw.rho_t_inv * a);
}

SuperPoly reciprocal_second_kind(const SuperPoly& alpha, const SuperPoly& f,
                                 int n, const TruncationPolicy& pol) {
    if (f.super_degree() != 0 || !f.is_local())
        throw std::runtime_error("second-kind generator must be even and local");
    auto nu = f.nu();
    if (!nu || *nu < 1)
        throw std::runtime_error("second-kind generator must have positive degree");
    return exp_ad(f * SuperPoly::zeta(), alpha, n, pol);
}

}  // namespace jacobi
