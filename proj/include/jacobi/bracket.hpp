// The Schouten-Nijenhuis bracket on quasi-local multivectors, the evaluation
// map of p-vectors on p functionals, and the classical operator presentation.
//
// Densities are SuperPoly values; a p-vector is a density of super-degree p
// (theta and zeta factors counted), considered modulo total derivatives.
// The ambient dimension n is passed explicitly throughout.
#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "jacobi/json_io.hpp"
#include "jacobi/superpoly.hpp"

namespace jacobi {

// Evaluation of the p-vector P on the even densities f_1..f_p:
//   j(P)(f..) = dd^{i_p}_{s_p}...dd^{i_1}_{s_1}(P)
//                 prod_k d^{s_k}(delta_{i_k} f_k)
//             + dd^{j_{p-1}}_{t_{p-1}}...dd^{j_1}_{t_1} dd_zeta(P)
//                 sum_k (-1)^{k-1} E(f_k) prod_{l != k} d^{t}(delta_j f_l)
// Returns a density of super-degree 0; alternating and well defined on the
// quotient.
SuperPoly multivector_evaluate(const SuperPoly& P,
                               const std::vector<SuperPoly>& fs, int n);

// density of [int P, int Q]:
//   delta^i(P) delta_i(Q) + (-1)^p delta_i(P) delta^i(Q)
//   + dd_zeta(P) E^(Q) + (-1)^p E^(P) dd_zeta(Q)
// (computed per super-homogeneous component of P and Q)
SuperPoly sn_bracket(const SuperPoly& P, const SuperPoly& Q, int n);

// The first-order derivation D_P with [P, Q]_pr ~ D_P(Q):
//   D_P = -dd_zeta(P) + (-1)^p E^(P) dd_zeta + X^{i,s} dd_{i,s} + Y_i^s dd^i_s
// with X^i = delta^i(P), Y_i = (-1)^p (delta_i(P) - theta_i dd_zeta(P)) and
// the prolonged coefficients X^{i,s}, Y_i^s.
struct DpOperator {
    int n = 1;
    int p = 0;                 // super-degree of P
    SuperPoly scalar;          // -dd_zeta(P), acting by multiplication
    SuperPoly zeta_coeff;      // (-1)^p E^(P), coefficient of dd_zeta
    std::vector<SuperPoly> X;  // X^i, i = 1..n
    std::vector<SuperPoly> Y;  // Y_i, i = 1..n

    SuperPoly apply(const SuperPoly& Q) const;
};
DpOperator dp_operator(const SuperPoly& P, int n);
SuperPoly dp_apply(const SuperPoly& P, const SuperPoly& Q, int n);

// Nijenhuis-Richardson evaluation of [P, Q] on p+q-1 functionals through the
// shuffle sum -- an independent oracle for evaluate(sn_bracket(P, Q), ...).
SuperPoly nr_bracket_eval(const SuperPoly& P, const SuperPoly& Q,
                          const std::vector<SuperPoly>& fs, int n);

bool check_jacobi(const SuperPoly& P, int n);                       // [P,P] ~ 0
bool check_compatible(const SuperPoly& P, const SuperPoly& Q, int n);  // [P,Q] ~ 0

// ---------------------------------------------------------------------------
// classical presentation: an n x n matrix of differential operators
// sum_s a_s d^s plus optional nonlocal tails a d^{-1} b (scalar case only)
// ---------------------------------------------------------------------------

struct OperatorMatrix {
    // one operator entry: list of (coefficient, power of d)
    using Entry = std::vector<std::pair<SuperPoly, int>>;
    struct Tail {
        SuperPoly a, b;  // the operator a d^{-1} b
    };

    int n = 1;
    std::vector<std::vector<Entry>> entries;  // [i-1][j-1]
    std::vector<Tail> tails;                  // only for n = 1

    static OperatorMatrix zero(int n);
    // normal-form coefficient of d^k in entry (i,j), collecting duplicates
    SuperPoly coeff(int i, int j, int k) const;
    int max_power() const;
};

struct NotSkewAdjoint : std::runtime_error {
    explicit NotSkewAdjoint(const std::string& w) : std::runtime_error(w) {}
};
struct UnsupportedTailShape : std::runtime_error {
    explicit UnsupportedTailShape(const std::string& w)
        : std::runtime_error(w) {}
};

bool is_skew_adjoint(const OperatorMatrix& A);

// A |-> (1/2) theta_i A^{ij}(theta_j) with each tail a d^{-1} b rewritten
// through zeta: admissible when b (or a) is a constant multiple of u^{1,1}.
SuperPoly bivector_from_operator(const OperatorMatrix& A);

// inverse presentation, reading the coefficients off delta^i of the density
OperatorMatrix operator_from_bivector(const SuperPoly& P, int n);

// X^i = sum_j A^{ij}(v_j); tails need d^{-1}(b v) to be an exact total
// derivative (throws NotExact otherwise)
std::vector<SuperPoly> apply_operator(const OperatorMatrix& A,
                                      const std::vector<SuperPoly>& v);

Json operator_to_json(const OperatorMatrix& A);
OperatorMatrix operator_from_json(const Json& j);

}  // namespace jacobi
