// Variational calculus on S and the constructive equivalence tests in the
// quotients F = A/dA and E = S/dS.
//
// Operators (all sums finite on polynomial input, d = extended total
// derivative):
//   momentum          p_{i,a,s} = sum_t (-1)^t C(t+s,s) d^t \partial_{i,a+s+t},
//                     with p_{i,a,-1} = \partial_{i,a-1}; odd analogue on theta
//   higher Euler ops  delta_{i,s} = p_{i,0,s}; variational derivative
//                     delta_i = delta_{i,0}; odd delta^i = sum_s (-d)^s
//                     \partial^i_s
//   energy family     E_s = sum_{a>=1} (u^{i,a} p_{i,a,s} + theta_i^a
//                     p^i_{a,s}); E = E_0 - 1; normalizer N = theta_i delta^i;
//                     E^ = E + N
// Every operation takes the ambient dimension n explicitly (the component
// sums and the zeta term of d run over i = 1..n).
#pragma once

#include <stdexcept>
#include <vector>

#include "jacobi/superpoly.hpp"

namespace jacobi {

SuperPoly momentum(const SuperPoly& f, int i, int alpha, int s, int n);
SuperPoly momentum_odd(const SuperPoly& f, int i, int alpha, int s, int n);

SuperPoly higher_euler(const SuperPoly& f, int i, int s, int n);
SuperPoly higher_euler_odd(const SuperPoly& f, int i, int s, int n);
SuperPoly variational_derivative(const SuperPoly& f, int i, int n);
SuperPoly variational_derivative_odd(const SuperPoly& f, int i, int n);

// E_s; for s = -1 this is the jet shift operator d + (u^{i,1} theta_i) d_zeta
SuperPoly energy_s(const SuperPoly& f, int s, int n);
SuperPoly energy(const SuperPoly& f, int n);       // E = E_0 - 1
SuperPoly normalizer(const SuperPoly& f, int n);   // N = theta_i delta^i
SuperPoly energy_hat(const SuperPoly& f, int n);   // E^ = E + N

// f in dA for super-degree-0 zeta-free f: zero constant term and delta_i f = 0
bool is_total_derivative(const SuperPoly& f, int n);

struct NotExact : std::runtime_error {
    explicit NotExact(const std::string& w) : std::runtime_error(w) {}
};

// Constructive inverse of the total derivative on zeta-free input with a
// local (zeta-free) preimage: returns g with d(g) = f, additive constant
// fixed to zero. Throws NotExact otherwise.
SuperPoly invert_total_derivative(const SuperPoly& f, int n);

// Equality test in E: decides whether the density P integrates to zero.
// Works per super-homogeneous component; three stages:
//   1. P = P_a + zeta P_b; P_b must be d-exact with a local preimage Q
//      (super-degree 0: constant-free with delta_i = 0; >= 1: delta^i = 0);
//   2. P' = P_a + (u^{i,1} theta_i) Q, a local representative;
//   3. p = 0: constant-free and delta_i(P') = 0; p = 1: delta^i(P') =
//      c u^{i,1} for one constant c; p >= 2: delta^i(P') = 0.
bool zero_test(const SuperPoly& P, int n);

struct ZeroTestReport {
    bool zero = false;
    std::string obstruction;  // empty when zero
    SuperPoly local_representative;
    Rational casimir_constant = 0;  // the constant c of the p = 1 stage
};
ZeroTestReport zero_test_report(const SuperPoly& P, int n);

struct NotClosed : std::runtime_error {
    explicit NotClosed(const std::string& w) : std::runtime_error(w) {}
};
struct PoleAtOrigin : std::runtime_error {
    explicit PoleAtOrigin(const std::string& w) : std::runtime_error(w) {}
};

// Inverse of the variational derivative on exact gradients: given gamma_i =
// delta_i(h), i = 1..n, reconstruct h (up to dA) by the homotopy
// h = sum_i sum_{monomials c m of gamma_i} c/(w+1) u^{i,0} m with w the total
// exponent weight of m. Verifies delta_i(h) = gamma_i and throws NotClosed on
// failure; polynomial input only (PoleAtOrigin otherwise).
SuperPoly homotopy_reconstruct(const std::vector<SuperPoly>& gamma, int n);

}  // namespace jacobi
