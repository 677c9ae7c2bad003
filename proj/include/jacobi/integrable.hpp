// Hamiltonian flows and the Lenard-Magri recursion for compatible pairs.
//
// For a bivector P and a local functional H the flow is the 1-vector [P, H];
// it is local exactly when the structure flow X = dd_zeta(P) satisfies
// [X, H] = 0, in which case a local evolutionary representative
// X^i theta_i is produced (normalized modulo the translation kernel
// R u^{i,1} theta_i).
//
// For a bi-Jacobi pair (P, Q) with P = 1/2 theta_i eta^{ij} theta_j^1 in
// constant normal form, lenard_step solves [P, H_{k+1}] = [Q, H_k] for the
// next local Hamiltonian: it inverts the total derivative on the flow
// components, reconstructs the density by the variational homotopy, and
// verifies the defining equation exactly before returning.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobi/json_io.hpp"
#include "jacobi/superpoly.hpp"

namespace jacobi {

struct NonLocalInput : std::runtime_error {
    explicit NonLocalInput(const std::string& w) : std::runtime_error(w) {}
};

struct FlowResult {
    SuperPoly flow;  // density of [P, H] as computed (may involve zeta)
    bool local = false;
    // evolutionary representative X^i theta_i, translation part dropped;
    // present exactly when local
    std::optional<SuperPoly> local_density;
};
FlowResult hamiltonian_flow(const SuperPoly& P, const SuperPoly& H, int n);

// rewrite a local 1-vector density as sum_i X^i theta_i modulo total
// derivatives, then drop the common c u^{i,1} theta_i translation component
SuperPoly evolutionary_form(const SuperPoly& X, int n);

// next Hamiltonian density of the recursion [P, H_{k+1}] = [Q, H_k];
// P must be 1/2 theta_i eta^{ij} theta_j^1 with constant invertible eta
SuperPoly lenard_step(const SuperPoly& P, const SuperPoly& Q,
                      const SuperPoly& Hk, int n);

struct Hierarchy {
    int n = 1;
    SuperPoly P, Q;
    std::vector<SuperPoly> H;  // densities H_0 .. H_k
    std::vector<SuperPoly> X;  // local flows X_1 .. X_k, X_m = [P, H_m]
};

// run the recursion `steps` times starting from H0
Hierarchy make_hierarchy(const SuperPoly& P, const SuperPoly& Q,
                         const SuperPoly& H0, int steps, int n);

struct InvolutionReport {
    bool ok = true;
    std::string failure;  // description of the first failing pair
};
// P(H_k, H_l) = Q(H_k, H_l) = 0 and [X_k, X_l] = 0 for all pairs
InvolutionReport verify_involution(const Hierarchy& h);

Json hierarchy_to_json(const Hierarchy& h);
Hierarchy hierarchy_from_json(const Json& j);

}  // namespace jacobi
