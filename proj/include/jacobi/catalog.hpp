// Builders for the concrete structures used throughout the test suite: the
// KdV family Q_0..Q_3, the Camassa-Holm family K_0..K_3, the hydrodynamic
// pair attached to a Frobenius potential together with its inversion
// symmetry, and the modified-KdV bridge.
//
// The KdV structures come from the classical operator presentations; all of
// them pass check_jacobi and all pairs pass check_compatible exactly.
//
// The Camassa-Holm operators are J_0 = d - d^3 and J_1 = m d + 1/2 m_1.  The
// recursion R = J_1 J_0^{-1} produces the higher structures; since
// J_0^{-1} = d^{-1} + d (1 - d^2)^{-1}, their local parts are genuinely
// infinite formal series in the differential degree, truncated here by an
// explicit policy.  K_2 = R(K_1) is constructed symbolically; K_3 is a stored
// density (one representative of R(K_2) pinned by the transformation to the
// KdV side), because the antiderivative ambiguity of d^{-1} no longer fixes
// the representative at the second application.  Construction verifies the
// graded Jacobi and compatibility identities degree by degree through the
// truncation window.
//
// A Frobenius potential F(v) with Euler data (d_i, r_i; d) determines the
// constant metric eta_{ij} = F_{1ij}, the structure constants
// c^k_{ij} = eta^{kl} F_{lij}, the intersection form g^{ij} = E^k c^{ij}_k,
// and the hydrodynamic pair
//   P_1 = 1/2 eta^{ij} theta_i theta_j^1,
//   P_2 = 1/2 (g^{ij} theta_i theta_j^1 + Gamma^{ij}_k u^{k,1} theta_i theta_j),
//   Gamma^{ij}_k = (1/2 + mu_j) c^{ij}_k,   mu_j = d_j + d/2 - 1.
// The inversion symmetry acts by the reciprocal transformation with rho = v^n
// followed by the change of flat coordinates
//   vt^1 = 1/2 eta_{kl} v^k v^l / v^n,  vt^i = v^i / v^n,  vt^n = -1/v^n,
// and reproduces the pair of the transformed potential
//   Ft = (vt^n)^2 F(v(vt)) + 1/2 eta_{kl} vt^1 vt^k vt^l
// with charge dt = 2 - d.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "jacobi/bracket.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/transform.hpp"

namespace jacobi {

struct WDVVViolation : std::runtime_error {
    explicit WDVVViolation(const std::string& w) : std::runtime_error(w) {}
};
struct NotQuasiHomogeneous : std::runtime_error {
    explicit NotQuasiHomogeneous(const std::string& w)
        : std::runtime_error(w) {}
};
struct RecursionNotQuasiLocal : std::runtime_error {
    explicit RecursionNotQuasiLocal(const std::string& w)
        : std::runtime_error(w) {}
};

// a catalog entry: a bivector density with a label such as "kdv.Q2"
struct NamedStructure {
    std::string label;
    int n = 1;
    SuperPoly density;
    std::string note;
};

// Q_0..Q_3 built from the operator presentations (the nonlocal d^{-1} tails
// of Q_2, Q_3 enter through zeta); exact, no truncation
std::vector<NamedStructure> kdv_structures();

// K_0..K_3; K_2, K_3 are formal series truncated at pol.max_degree and are
// verified degree by degree through the window.  K_2 and K_3 carry the
// normalization in which the sqrt(m)-reciprocal transformation followed by
// the Miura map u = 1/(4m) + m_2/(4m) - 3 m_1^2/(16 m^2) sends K_2 to Q_1
// and K_3 to Q_0 (so K_2 = 4 J_2 and K_3 = 16 J_3 in terms of the operator
// recursion).  Stored density data limits pol.max_degree to 9.
std::vector<NamedStructure> ch_structures(
    const TruncationPolicy& pol = TruncationPolicy{9, false});

// One application of R = J_1 J_0^{-1} to a scalar operator, expanding
// (1 - d^2)^{-1} as a geometric series truncated at pol.max_degree.  Tails
// a d^{-1} b require a polynomial antiderivative of a; throws
// RecursionNotQuasiLocal when the result leaves the admissible tail class.
OperatorMatrix ch_recursion(const OperatorMatrix& J,
                            const TruncationPolicy& pol);

// density 1/2 theta A theta with the tails rewritten through zeta
// (admissible when a or b of each tail is a constant multiple of u^{1,1});
// unlike bivector_from_operator this does not require A to be presented in
// skew-adjoint form: the symmetric part integrates to zero
SuperPoly ch_bivector(const OperatorMatrix& A, const TruncationPolicy& pol);

// ---------------------------------------------------------------------------
// Frobenius potentials
// ---------------------------------------------------------------------------

struct FrobeniusData {
    int n = 1;
    SuperPoly F;                 // potential, order-0 even variables only
    std::vector<Rational> deg;   // d_i, with d_1 = 1
    std::vector<Rational> r;     // shifts r_i of the Euler field
    Rational d;                  // conformal charge
    // derived data
    std::vector<std::vector<Rational>> eta;      // eta_{ij} = F_{1ij}
    std::vector<std::vector<Rational>> eta_inv;  // eta^{ij}
    Poly3 c;                     // c^k_{ij}, indexed [k-1][i-1][j-1]
    std::vector<SuperPoly> E;    // Euler components E^i = d_i v^i + r_i
    PolyMatrix g;                // intersection form g^{ij} = E^k c^{ij}_k
};

struct FrobeniusPair {
    FrobeniusData data;
    SuperPoly P1, P2;
};

// Verifies that eta is constant and invertible, that the WDVV
// associativity equations hold
// (WDVVViolation otherwise), and that dE F = (3-d) F + quadratic
// (NotQuasiHomogeneous otherwise); then builds the pair and checks
// check_jacobi / check_compatible at construction.
FrobeniusPair frobenius_build(int n, const SuperPoly& F,
                              std::vector<Rational> deg,
                              std::vector<Rational> r, const Rational& d);

struct InversionReport {
    std::vector<SuperPoly> vt;     // tilde coordinates as functions of v
    std::vector<SuperPoly> vback;  // v as functions of the tilde coordinates
    SuperPoly Ft;                  // transformed potential, in tilde coordinates
    Rational dt;                   // transformed charge, 2 - d
    FrobeniusPair image;           // frobenius_build of Ft
    bool p1_matches = false;       // transformed P_1 equals image.P1
    bool p2_matches = false;       // transformed P_2 equals image.P2
};

// Applies the reciprocal transformation with rho = v^n to (P_1, P_2),
// changes coordinates by the inversion, and compares exactly against the
// pair built from the transformed potential.
InversionReport frobenius_inversion(const FrobeniusPair& fp);

// ---------------------------------------------------------------------------
// the modified-KdV bridge
// ---------------------------------------------------------------------------

struct KappaVerdict {
    std::string structure;  // "Q0".."Q3"
    std::string rho;        // conserved density used
    Rational kappa;         // its charge for the second KdV structure
    bool local = false;     // whether the reciprocal transform stays local
};

struct MkdvBridge {
    MiuraMap miura;        // u = v^2 + v_x
    ReciprocalMap rho2v;   // rho = 2v on the modified side
    SuperPoly S2, S3;      // representatives of Q_2, Q_3 in the v variables
    std::vector<KappaVerdict> table;
};

// Builds the transforms, verifies that S2, S3 map to Q_2, Q_3 under the
// Miura map, and runs the locality checks for rho in {1, u, u^2} on the u
// side (kappa = 0, 1, 2) and rho = 2v on the v side (kappa = 1/2).
MkdvBridge mkdv_bridge();

// catalog access for the command-line front end
std::vector<NamedStructure> catalog_entries();
NamedStructure catalog_lookup(const std::string& label);

}  // namespace jacobi
