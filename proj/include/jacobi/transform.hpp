// Miura-type and reciprocal transformations of quasi-local multivectors.
//
// A Miura map is a change of dependent variables ubar^j = F^j(u-jets) with
// invertible degree-zero leading part.  The induced isomorphism Phi-bar acts
// on a density in the source coordinates by replacing the odd variables
//   theta_i^s  ->  d^s sum_t (-d)^t( d(F^j)/d(u^{i,t}) * thetabar_j ),
//   zeta       ->  zetabar
//                  + sum_{s>=0, a>=1} u^{i,a} (-d)^s( dF^j/du^{i,s+a} * thetabar_j ),
// while elements of the coefficient algebra stay put.  The result represents
// the transformed multivector with the *barred* odd variables but with its
// coefficients still written in the source jet presentation (re-expressing
// them in barred jets requires the inverse map, which is generally not
// polynomial; when an inverse is supplied it is applied).  Equality of such
// mixed representatives with a target-coordinate density is decided by
// miura_matches, which pulls the target density back through the map and
// tests exactness in the source presentation.
//
// A reciprocal transformation w.r.t. an invertible density rho changes the
// spatial variable, dx~ = rho dx.  Densities are rewritten in the tilde jet
// coordinates u~^{i,s} = (rho^{-1} d)^s u^i, the odd variables transform by
//   theta_i^s -> (rho d~)^s ( rho theta~_i - sum_t (-rho d~)^t( dr/du^{i,t} zeta~ ) ),
//   zeta      -> rho zeta~
//                - sum_{s>=0,a>=1} u^{i,a} (-rho d~)^s( dr/du^{i,s+a} zeta~ ),
// and the density picks up an overall factor rho^{-1}.  For a first-kind rho
// (order-0 variables only, single invertible monomial) everything is exact;
// otherwise the rewrite is a formal series truncated by an explicit policy.
//
// Second-kind transformations of either type are the automorphisms
// exp(ad_X) with a local 1-vector X of positive differential degree
// (X = int X^i theta_i dx for Miura, X = int f zeta dx for reciprocal),
// computed as degree-truncated Lie series.
#pragma once

#include <stdexcept>
#include <vector>

#include "jacobi/superpoly.hpp"

namespace jacobi {

struct SingularJacobian : std::runtime_error {
    explicit SingularJacobian(const std::string& w) : std::runtime_error(w) {}
};
struct NonInvertibleRho : std::runtime_error {
    explicit NonInvertibleRho(const std::string& w) : std::runtime_error(w) {}
};
struct TruncationOverflow : std::runtime_error {
    explicit TruncationOverflow(const std::string& w) : std::runtime_error(w) {}
};

// Caps formal series at differential degree max_degree.  When
// error_on_overflow is set, dropping a nonzero term throws
// TruncationOverflow instead of truncating silently.
struct TruncationPolicy {
    long max_degree = 0;
    bool error_on_overflow = false;
};

// drop every homogeneous component of degree > pol.max_degree
SuperPoly truncate_degree(const SuperPoly& p, const TruncationPolicy& pol);

// ---------------------------------------------------------------------------
// Miura type transformations
// ---------------------------------------------------------------------------

struct MiuraMap {
    int n = 1;
    std::vector<SuperPoly> images;   // ubar^j as elements of the source algebra
    std::vector<SuperPoly> inverse;  // optional: u^i in barred jets (may be empty)

    bool first_kind() const;   // images depend on order-0 variables only
    bool second_kind() const;  // degree-0 parts equal u^i
};

// validates super-degrees and the nondegeneracy of the degree-0 Jacobian;
// when an inverse is supplied, verifies F(G(ubar)) = ubar exactly
MiuraMap make_miura(int n, std::vector<SuperPoly> images);
MiuraMap make_miura(int n, std::vector<SuperPoly> images,
                    std::vector<SuperPoly> inverse);

// determinant of the matrix d(images_j degree-0 part)/d u^{i,0}
SuperPoly miura_jacobian_det(const MiuraMap& m);

// pull a density written in the barred coordinates back to the source
// presentation: ubar^{j,s} -> d^s(images[j]), odd variables unchanged
SuperPoly miura_pullback(const SuperPoly& beta, const MiuraMap& m);

// Phi-bar applied to a source-coordinate density.  The returned density
// carries the barred odd variables; its even coefficients stay in the source
// presentation unless m.inverse is available, in which case they are
// re-expressed in barred jets.
SuperPoly miura_transform(const SuperPoly& alpha, const MiuraMap& m);

// decide  miura_transform(alpha) ~ beta  (beta written in barred
// coordinates), working entirely in the source presentation
bool miura_matches(const SuperPoly& alpha, const SuperPoly& beta,
                   const MiuraMap& m);

// exp(ad_X)(alpha) as a degree-truncated Lie series; X must be a local
// 1-vector (or a zeta-multiple for reciprocal use) of positive degree
SuperPoly exp_ad(const SuperPoly& X, const SuperPoly& alpha, int n,
                 const TruncationPolicy& pol);

// second-kind Miura transformation exp(-ad_X)(alpha), nu(X) > 0
SuperPoly miura_second_kind(const SuperPoly& alpha, const SuperPoly& X, int n,
                            const TruncationPolicy& pol);

// ---------------------------------------------------------------------------
// reciprocal transformations
// ---------------------------------------------------------------------------

struct ReciprocalMap {
    int n = 1;
    SuperPoly rho;
    SuperPoly rho0_inv;       // exact inverse of the degree-0 monomial part
    bool first_kind = true;   // rho involves order-0 variables only
};

// rho must have an invertible (single-monomial) degree-0 part
ReciprocalMap make_reciprocal(int n, const SuperPoly& rho);

// the expression of u^{i,s} in the tilde jet coordinates (identity for s = 0)
SuperPoly reciprocal_jet_rewrite(const ReciprocalMap& r, int i, int s,
                                 const TruncationPolicy& pol);

// rho itself and its inverse written in the tilde presentation
SuperPoly reciprocal_rho_tilde(const ReciprocalMap& r,
                               const TruncationPolicy& pol);
SuperPoly reciprocal_rho_tilde_inv(const ReciprocalMap& r,
                                   const TruncationPolicy& pol);

// density of Phi(int alpha dx) in the tilde variables (exact for first-kind
// maps; truncated at pol.max_degree otherwise)
SuperPoly reciprocal_transform(const SuperPoly& alpha, const ReciprocalMap& r,
                               const TruncationPolicy& pol);

// second-kind reciprocal transformation for rho = e^f: exp(ad_Y)(alpha) with
// Y = int f zeta dx; requires f even, local, nu(f) > 0
SuperPoly reciprocal_second_kind(const SuperPoly& alpha, const SuperPoly& f,
                                 int n, const TruncationPolicy& pol);

}  // namespace jacobi
