// Differential-geometric content of hydrodynamic quasi-local bivectors.
//
// A super-degree-2 density with hydrodynamic leading term
//   P ~ int ( 1/2 ( g^{ij} theta_i theta_j^1 + G^{ij}_k u^{k,1} theta_i theta_j )
//             + zeta V^i_k u^{k,1} theta_i ) dx + higher degree
// determines a contravariant metric g, contravariant connection coefficients
// G^{ij}_k with G^{ij}_k + G^{ji}_k = dg^{ij}/du^k, and an affinor V.  The
// bivector is a Jacobi structure exactly when the connection is the
// Levi-Civita connection of g, V lowers to a symmetric tensor satisfying the
// Codazzi equation, and the curvature is the exterior square of V:
//   R_{ijkl} = g_{ik} V_{jl} + g_{jl} V_{ik} - g_{jk} V_{il} - g_{il} V_{jk}.
//
// The module also computes the constant charge obstructing the locality of a
// reciprocal transform (for 2-vectors), constructive locality witnesses for
// transformed multivectors, and the central invariants of a bihamiltonian
// pair written in canonical coordinates.
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jacobi/json_io.hpp"
#include "jacobi/ratfun.hpp"
#include "jacobi/transform.hpp"

namespace jacobi {

struct NotHydrodynamic : std::runtime_error {
    explicit NotHydrodynamic(const std::string& w) : std::runtime_error(w) {}
};
struct DegenerateMetric : std::runtime_error {
    explicit DegenerateMetric(const std::string& w) : std::runtime_error(w) {}
};
struct NotConserved : std::runtime_error {
    explicit NotConserved(const std::string& w) : std::runtime_error(w) {}
};
struct NonConstantCharge : std::runtime_error {
    explicit NonConstantCharge(const std::string& w) : std::runtime_error(w) {}
};
struct NotSemisimple : std::runtime_error {
    explicit NotSemisimple(const std::string& w) : std::runtime_error(w) {}
};
struct MissingCoordinates : std::runtime_error {
    explicit MissingCoordinates(const std::string& w) : std::runtime_error(w) {}
};

using Poly3 = std::vector<std::vector<std::vector<SuperPoly>>>;
using Rat3 = std::vector<std::vector<std::vector<RationalFunction>>>;
using Rat4 = std::vector<std::vector<std::vector<std::vector<RationalFunction>>>>;

struct HydroStructure {
    int n = 1;
    PolyMatrix g;      // g^{ij}, symmetric, entries in order-0 variables only
    Poly3 Gamma;       // G^{ij}_k, indexed [i-1][j-1][k-1]
    PolyMatrix V;      // V^i_k

    SuperPoly det_g() const;
    RatMatrix g_lower() const;       // g_{ij} = (g^{ij})^{-1}
    Rat3 christoffel() const;        // G^j_{kl} = -g_{ki} G^{ij}_l, [j][k][l]
    RatMatrix v_lower() const;       // V_{kj} = g_{ki} V^i_j
};

// the canonical density 1/2(g t t^1 + G u^1 t t) + zeta V u^1 t
SuperPoly hydro_bivector(const HydroStructure& h);

// Read (g, G, V) from the degree-1 part of a super-degree-2 density after
// normalizing modulo total derivatives.  Throws NotHydrodynamic when P is not
// super-degree-2 homogeneous or the degree-1 data does not rebuild P's
// leading term, DegenerateMetric when det g = 0 identically.
HydroStructure extract_hydro(const SuperPoly& P, int n);

struct CurvatureReport {
    Rat4 riemann;             // R_{ijkl}
    RatMatrix ricci;          // R_{jl} = R^k_{jkl}
    RationalFunction scalar;  // g^{jl} R_{jl}
    Rat4 weyl;                // conformal Weyl tensor (zero for n <= 2)
    Rat3 cotton;              // C_{ijk} = D_k S_{ij} - D_j S_{ik} (zero, n <= 2)
};
// curvature of the Levi-Civita-type connection G^j_{kl}, in the convention
//   R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
CurvatureReport curvature(const HydroStructure& h);

struct FeraReport {
    bool gamma_symmetric = false;  // G^j_{kl} = G^j_{lk}
    bool v_symmetric = false;      // V_{kj} = V_{jk}
    bool codazzi = false;          // D_k V_{lj} = D_l V_{kj}
    bool curvature_form = false;   // R_{ijkl} = g_{ik}V_{jl} + g_{jl}V_{ik} - ...
    bool holds() const {
        return gamma_symmetric && v_symmetric && codazzi && curvature_form;
    }
};
// the four geometric conditions equivalent to [P, P] ~ 0 for the
// hydrodynamic bivector built from h
FeraReport check_fera(const HydroStructure& h);

// The constant z with Phi_rho(P) ~ int(P~_0 + z u~^{i,1} theta~_i zeta~) dx~
// for a conserved density rho of the hydrodynamic 2-vector P: with rho_0 the
// degree-0 part of rho and sigma solving d(sigma) = d^s(delta^i(X)) d_{i,s}(rho),
//   D^i D_k(rho_0) + rho_0 V^i_k + sigma_0 delta^i_k = c delta^i_k,
//   z = 1/2 (D^l rho_0)(D_l rho_0) + rho_0 (sigma_0 - c).
// Throws NotConserved when [P, int rho dx] != 0 and NonConstantCharge when
// the displayed equations do not reduce to rational constants.
Rational nonlocal_charge(const SuperPoly& P, const SuperPoly& rho, int n);

struct LocalityWitness {
    bool local = false;
    std::optional<Rational> charge;    // the obstruction z (2-vectors only)
    std::optional<SuperPoly> density;  // a zeta-free tilde density when local
};
// Decide whether the reciprocal transform of P by rho is local:
// [P, int rho dx] ~ 0 suffices for super-degree != 2; super-degree 2
// additionally needs nonlocal_charge = 0.  When local, a zeta-free density of
// the transformed multivector is produced and verified.
LocalityWitness check_locality(const SuperPoly& P, const SuperPoly& rho, int n,
                               const TruncationPolicy& pol);

// degree-0 part of the even coefficient of dd^j_m delta^i(P): the leading
// symbol tensors A^{ij}_m (A_0 = 0, A_1 = g for a hydrodynamic bivector)
SuperPoly ab_tensor(const SuperPoly& P, int i, int j, int m, int n);

struct CentralInvariantReport {
    int n = 1;
    std::vector<RationalFunction> lambda;  // canonical eigenvalues, per i
    std::vector<RationalFunction> f;       // g_1^{ii} in canonical coordinates
    std::vector<RationalFunction> c;       // central invariants c_i
    // leading symbol tensors of (P, Q) in the input coordinates, [i][j][m]
    std::vector<std::vector<std::array<SuperPoly, 4>>> A, B;
};
// Central invariants of the bihamiltonian pair (P, Q):
//   c_i = 1/(3 f_i^2) ( B~^{ii}_3 - lambda_i A~^{ii}_3
//          + sum_{k != i} (B~^{ki}_2 - lambda_i A~^{ki}_2)^2 / (f_k (lambda_k - lambda_i)) )
// computed in canonical coordinates.  For n = 1 the canonical coordinate
// lambda = g_2/g_1 is formed automatically; for n >= 2 the input pair must
// already be presented in coordinates diagonalizing both metrics with
// lambda_i a non-constant function of u^i alone (MissingCoordinates
// otherwise).  Throws NotSemisimple when the eigenvalues are constant,
// coincide, or a metric entry f_i vanishes.
CentralInvariantReport central_invariants(const SuperPoly& P, const SuperPoly& Q,
                                          int n);

Json hydro_to_json(const HydroStructure& h);
HydroStructure hydro_from_json(const Json& j);

}  // namespace jacobi
