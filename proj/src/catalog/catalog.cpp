// Construction of the named structures: the KdV family, the Camassa-Holm
// family with its quasi-local recursion, hydrodynamic pairs from Frobenius
// potentials with the inversion symmetry, and the modified-KdV bridge.
#include "jacobi/catalog.hpp"

#include <map>
#include <optional>
#include <utility>

#include "jacobi/varcalc.hpp"

namespace jacobi {

namespace {

SuperPoly U(int i, int s) { return SuperPoly::even_var(i, s); }
SuperPoly T(int i, int s) { return SuperPoly::odd_var(i, s); }
SuperPoly C(long p, long q = 1) { return SuperPoly(Rational(p, q)); }

// ---------------------------------------------------------------------------
// the scalar quasi-local operator algebra driving the recursion
// ---------------------------------------------------------------------------

// sum_k coef[k] d^k + sum tails a d^{-1} b, every product truncated so that
// the bivector degree (coefficient degree + power) stays within max_degree
struct ScalarOp {
    long max_degree = 0;
    std::map<int, SuperPoly> coef;
    std::vector<OperatorMatrix::Tail> tails;

    void add(int k, const SuperPoly& c) {
        if (c.is_zero()) return;
        SuperPoly kept = truncate_degree(c, {max_degree - k, false});
        if (!kept.is_zero()) coef[k] += kept;
    }
    void add_tail(const SuperPoly& a, const SuperPoly& b) {
        if (a.is_zero() || b.is_zero()) return;
        for (auto& t : tails)
            if (t.b == b) {
                t.a += a;
                return;
            }
        tails.push_back({a, b});
    }
};

ScalarOp to_scalar(const OperatorMatrix& J, long max_degree) {
    if (J.n != 1)
        throw std::invalid_argument("the recursion is defined for n = 1");
    ScalarOp s;
    s.max_degree = max_degree;
    for (const auto& [c, k] : J.entries[0][0]) s.add(k, c);
    for (const auto& t : J.tails) s.add_tail(t.a, t.b);
    return s;
}

OperatorMatrix from_scalar(const ScalarOp& s) {
    OperatorMatrix A = OperatorMatrix::zero(1);
    for (const auto& [k, c] : s.coef)
        if (!c.is_zero()) A.entries[0][0].push_back({c, k});
    A.tails = s.tails;
    return A;
}

SuperPoly dx(const SuperPoly& f) { return f.dtotal(1); }

// R(J) = J_1 (d^{-1} + d (1 - d^2)^{-1}) J with J_1 = m d + 1/2 m_1 and the
// geometric series for (1 - d^2)^{-1} cut at the truncation degree
ScalarOp recursion_step(const ScalarOp& J) {
    const long D = J.max_degree;
    SuperPoly m = U(1, 0), m1 = U(1, 1);
    ScalarOp mid;
    mid.max_degree = D;
    // d^{-1} composed with the local part: peel powers of d by parts
    for (const auto& [k, a] : J.coef) {
        SuperPoly cur = a;
        int p = k;
        while (p >= 1) {
            mid.add(p - 1, cur);
            cur = C(-1) * dx(cur);
            --p;
        }
        mid.add_tail(C(1), cur);
    }
    // d^{-1} (a d^{-1} b) = A d^{-1} b - d^{-1} (A b) with A = d^{-1} a,
    // which requires a polynomial antiderivative of a
    for (const auto& t : J.tails) {
        SuperPoly A;
        try {
            A = invert_total_derivative(t.a, 1);
        } catch (const NotExact&) {
            throw RecursionNotQuasiLocal(
                "tail coefficient has no polynomial antiderivative");
        }
        mid.add_tail(A, t.b);
        mid.add_tail(C(-1), A * t.b);
    }
    // d (1 - d^2)^{-1} = sum of odd powers of d, composed by Leibniz
    for (long pw = 1; pw <= D + 2; pw += 2) {
        for (const auto& [k, a] : J.coef) {
            SuperPoly der = a;
            Rational binom(1);
            for (long i = 0; i <= pw; ++i) {
                mid.add(static_cast<int>(pw - i) + k, SuperPoly(binom) * der);
                der = dx(der);
                binom = binom * Rational(pw - i) / Rational(i + 1);
            }
        }
        for (const auto& t : J.tails) {
            // d^pw a d^{-1} b = sum_{i<pw} C(pw,i) a^(i) d^{pw-1-i} b
            //                   + a^(pw) d^{-1} b
            SuperPoly der = t.a;
            Rational binom(1);
            for (long i = 0; i < pw; ++i) {
                SuperPoly bb = t.b;
                Rational binom2(1);
                long q = pw - 1 - i;
                for (long j = 0; j <= q; ++j) {
                    mid.add(static_cast<int>(q - j),
                            SuperPoly(binom * binom2) * der * bb);
                    bb = dx(bb);
                    binom2 = binom2 * Rational(q - j) / Rational(j + 1);
                }
                der = dx(der);
                binom = binom * Rational(pw - i) / Rational(i + 1);
            }
            mid.add_tail(SuperPoly(binom) * der, t.b);
        }
    }
    // J_1 composed on the left
    ScalarOp out;
    out.max_degree = D;
    for (const auto& [k, a] : mid.coef) {
        out.add(k + 1, m * a);
        out.add(k, m * dx(a) + C(1, 2) * m1 * a);
    }
    for (const auto& t : mid.tails) {
        out.add(0, m * t.a * t.b);
        out.add_tail(m * dx(t.a) + C(1, 2) * m1 * t.a, t.b);
    }
    return out;
}

// the constant c when f = c u^{1,1}; nullopt otherwise
std::optional<Rational> u1_multiple(const SuperPoly& f) {
    SuperPoly c = f.partial(Var::even(1, 1));
    if (!(f - c * U(1, 1)).is_zero()) return std::nullopt;
    if (c.super_degree() != 0 || c.max_diff_degree() != 0) return std::nullopt;
    for (const auto& [mon, cf] : c.terms()) {
        if (!mon.even.empty()) return std::nullopt;
        return cf;
    }
    return Rational(0);
}

// density 1/2 theta A theta; a symmetric local part contributes only total
// derivatives, so the operator need not be presented in skew-adjoint form.
// Tails are rewritten through zeta using d^{-1}(u^{1,1} theta) = zeta.
SuperPoly scalar_bivector(const ScalarOp& J) {
    const TruncationPolicy pol{J.max_degree, false};
    SuperPoly dens;
    for (const auto& [k, c] : J.coef) dens += C(1, 2) * c * T(1, 0) * T(1, k);
    for (const auto& t : J.tails) {
        if (auto cb = u1_multiple(t.b)) {
            dens += SuperPoly(-*cb / Rational(2)) * truncate_degree(t.a, pol) *
                    T(1, 0) * SuperPoly::zeta();
            continue;
        }
        if (auto ca = u1_multiple(t.a)) {
            dens += SuperPoly(*ca / Rational(2)) * truncate_degree(t.b, pol) *
                    SuperPoly::zeta() * T(1, 0);
            continue;
        }
        throw RecursionNotQuasiLocal(
            "tail is outside the admissible class: neither end is a "
            "constant multiple of u^{1,1}");
    }
    return truncate_degree(dens, pol);
}

// ---------------------------------------------------------------------------
// stored verified densities
// ---------------------------------------------------------------------------

// K_2 and K_3 in the normalization sending them to Q_1 and Q_0 under the
// square-root reciprocal map followed by the rational Miura map; series
// windows through differential degree 9.  K_2 agrees with the symbolic
// recursion degree by degree; K_3 is the representative pinned by the
// transformation (the recursion alone leaves a d^{-1}-kernel ambiguity when
// applied to a tail-bearing operator).
const char* const kK2Density =
    "1/2*u[1,1]*z*t[1,0] + u[1,0]*z*t[1,1] + u[1,0]*u[1,2]*t[1,0]*t[1,1] "
    "+ u[1,0]*u[1,4]*t[1,0]*t[1,1] + u[1,0]*u[1,6]*t[1,0]*t[1,1] + "
    "u[1,0]*u[1,8]*t[1,0]*t[1,1] + 2*u[1,0]^2*t[1,0]*t[1,1] - "
    "5/2*u[1,1]*u[1,3]*t[1,0]*t[1,1] - 7/2*u[1,1]*u[1,5]*t[1,0]*t[1,1] - "
    "9/2*u[1,1]*u[1,7]*t[1,0]*t[1,1] - 3/2*u[1,1]^2*t[1,0]*t[1,1] - "
    "u[1,0]*u[1,1]*t[1,0]*t[1,2] - 9/2*u[1,1]*u[1,2]*t[1,0]*t[1,2] - "
    "10*u[1,1]*u[1,4]*t[1,0]*t[1,2] - 35/2*u[1,1]*u[1,6]*t[1,0]*t[1,2] - "
    "15*u[1,1]*u[1,3]*t[1,0]*t[1,3] - 77/2*u[1,1]*u[1,5]*t[1,0]*t[1,3] - "
    "7/2*u[1,1]^2*t[1,0]*t[1,3] - u[1,0]*u[1,1]*t[1,0]*t[1,4] - "
    "25/2*u[1,1]*u[1,2]*t[1,0]*t[1,4] - 105/2*u[1,1]*u[1,4]*t[1,0]*t[1,4] "
    "- 91/2*u[1,1]*u[1,3]*t[1,0]*t[1,5] - 11/2*u[1,1]^2*t[1,0]*t[1,5] - "
    "u[1,0]*u[1,1]*t[1,0]*t[1,6] - 49/2*u[1,1]*u[1,2]*t[1,0]*t[1,6] - "
    "15/2*u[1,1]^2*t[1,0]*t[1,7] - u[1,0]*u[1,1]*t[1,0]*t[1,8] - "
    "9*u[1,0]*u[1,2]*t[1,1]*t[1,2] - 20*u[1,0]*u[1,4]*t[1,1]*t[1,2] - "
    "35*u[1,0]*u[1,6]*t[1,1]*t[1,2] - 2*u[1,0]^2*t[1,1]*t[1,2] - "
    "7*u[1,0]*u[1,1]*t[1,1]*t[1,3] - 30*u[1,0]*u[1,3]*t[1,1]*t[1,3] - "
    "77*u[1,0]*u[1,5]*t[1,1]*t[1,3] - 25*u[1,0]*u[1,2]*t[1,1]*t[1,4] - "
    "105*u[1,0]*u[1,4]*t[1,1]*t[1,4] - 2*u[1,0]^2*t[1,1]*t[1,4] - "
    "11*u[1,0]*u[1,1]*t[1,1]*t[1,5] - 91*u[1,0]*u[1,3]*t[1,1]*t[1,5] - "
    "49*u[1,0]*u[1,2]*t[1,1]*t[1,6] - 2*u[1,0]^2*t[1,1]*t[1,6] - "
    "15*u[1,0]*u[1,1]*t[1,1]*t[1,7] - 2*u[1,0]^2*t[1,1]*t[1,8]";

const char* const kK3Density =
    "2*u[1,0]*u[1,1]*z*t[1,0] + 2*u[1,0]*u[1,3]*z*t[1,0] + "
    "2*u[1,0]*u[1,5]*z*t[1,0] + 2*u[1,0]*u[1,7]*z*t[1,0] + "
    "2*u[1,0]*u[1,9]*z*t[1,0] + 8*u[1,0]*u[1,2]*z*t[1,1] + "
    "12*u[1,0]*u[1,4]*z*t[1,1] + 16*u[1,0]*u[1,6]*z*t[1,1] + "
    "20*u[1,0]*u[1,8]*z*t[1,1] + 4*u[1,0]^2*z*t[1,1] + "
    "10*u[1,0]*u[1,1]*z*t[1,2] + 28*u[1,0]*u[1,3]*z*t[1,2] + "
    "54*u[1,0]*u[1,5]*z*t[1,2] + 88*u[1,0]*u[1,7]*z*t[1,2] + "
    "32*u[1,0]*u[1,2]*z*t[1,3] + 100*u[1,0]*u[1,4]*z*t[1,3] + "
    "224*u[1,0]*u[1,6]*z*t[1,3] + 4*u[1,0]^2*z*t[1,3] + "
    "18*u[1,0]*u[1,1]*z*t[1,4] + 110*u[1,0]*u[1,3]*z*t[1,4] + "
    "364*u[1,0]*u[1,5]*z*t[1,4] + 72*u[1,0]*u[1,2]*z*t[1,5] + "
    "392*u[1,0]*u[1,4]*z*t[1,5] + 4*u[1,0]^2*z*t[1,5] + "
    "26*u[1,0]*u[1,1]*z*t[1,6] + 280*u[1,0]*u[1,3]*z*t[1,6] + "
    "128*u[1,0]*u[1,2]*z*t[1,7] + 4*u[1,0]^2*z*t[1,7] + "
    "34*u[1,0]*u[1,1]*z*t[1,8] + 4*u[1,0]^2*z*t[1,9] - "
    "16*u[1,0]*u[1,1]*u[1,3]*t[1,0]*t[1,1] - "
    "20*u[1,0]*u[1,1]*u[1,5]*t[1,0]*t[1,1] - "
    "24*u[1,0]*u[1,1]*u[1,7]*t[1,0]*t[1,1] - "
    "6*u[1,0]*u[1,1]^2*t[1,0]*t[1,1] + "
    "20*u[1,0]*u[1,2]*u[1,4]*t[1,0]*t[1,1] + "
    "24*u[1,0]*u[1,2]*u[1,6]*t[1,0]*t[1,1] + "
    "8*u[1,0]*u[1,2]^2*t[1,0]*t[1,1] - "
    "24*u[1,0]*u[1,3]*u[1,5]*t[1,0]*t[1,1] - "
    "10*u[1,0]*u[1,3]^2*t[1,0]*t[1,1] + 12*u[1,0]*u[1,4]^2*t[1,0]*t[1,1] "
    "+ 20*u[1,0]^2*u[1,2]*t[1,0]*t[1,1] + "
    "28*u[1,0]^2*u[1,4]*t[1,0]*t[1,1] + 36*u[1,0]^2*u[1,6]*t[1,0]*t[1,1] "
    "+ 44*u[1,0]^2*u[1,8]*t[1,0]*t[1,1] + 8*u[1,0]^3*t[1,0]*t[1,1] - "
    "8*u[1,0]*u[1,1]*u[1,2]*t[1,0]*t[1,2] - "
    "30*u[1,0]*u[1,1]*u[1,4]*t[1,0]*t[1,2] - "
    "60*u[1,0]*u[1,1]*u[1,6]*t[1,0]*t[1,2] + "
    "10*u[1,0]*u[1,2]*u[1,3]*t[1,0]*t[1,2] + "
    "36*u[1,0]*u[1,2]*u[1,5]*t[1,0]*t[1,2] - "
    "12*u[1,0]*u[1,3]*u[1,4]*t[1,0]*t[1,2] + "
    "16*u[1,0]^2*u[1,1]*t[1,0]*t[1,2] + 52*u[1,0]^2*u[1,3]*t[1,0]*t[1,2] "
    "+ 104*u[1,0]^2*u[1,5]*t[1,0]*t[1,2] + "
    "172*u[1,0]^2*u[1,7]*t[1,0]*t[1,2] - "
    "74*u[1,0]*u[1,1]*u[1,3]*t[1,0]*t[1,3] - "
    "168*u[1,0]*u[1,1]*u[1,5]*t[1,0]*t[1,3] - "
    "14*u[1,0]*u[1,1]^2*t[1,0]*t[1,3] + "
    "132*u[1,0]*u[1,2]*u[1,4]*t[1,0]*t[1,3] + "
    "32*u[1,0]*u[1,2]^2*t[1,0]*t[1,3] - 60*u[1,0]*u[1,3]^2*t[1,0]*t[1,3] "
    "+ 68*u[1,0]^2*u[1,2]*t[1,0]*t[1,3] + "
    "204*u[1,0]^2*u[1,4]*t[1,0]*t[1,3] + "
    "452*u[1,0]^2*u[1,6]*t[1,0]*t[1,3] + 8*u[1,0]^3*t[1,0]*t[1,3] - "
    "32*u[1,0]*u[1,1]*u[1,2]*t[1,0]*t[1,4] - "
    "192*u[1,0]*u[1,1]*u[1,4]*t[1,0]*t[1,4] + "
    "60*u[1,0]*u[1,2]*u[1,3]*t[1,0]*t[1,4] + "
    "32*u[1,0]^2*u[1,1]*t[1,0]*t[1,4] + 216*u[1,0]^2*u[1,3]*t[1,0]*t[1,4] "
    "+ 724*u[1,0]^2*u[1,5]*t[1,0]*t[1,4] - "
    "204*u[1,0]*u[1,1]*u[1,3]*t[1,0]*t[1,5] - "
    "22*u[1,0]*u[1,1]^2*t[1,0]*t[1,5] + 72*u[1,0]*u[1,2]^2*t[1,0]*t[1,5] "
    "+ 148*u[1,0]^2*u[1,2]*t[1,0]*t[1,5] + "
    "788*u[1,0]^2*u[1,4]*t[1,0]*t[1,5] + 8*u[1,0]^3*t[1,0]*t[1,5] - "
    "72*u[1,0]*u[1,1]*u[1,2]*t[1,0]*t[1,6] + "
    "48*u[1,0]^2*u[1,1]*t[1,0]*t[1,6] + 556*u[1,0]^2*u[1,3]*t[1,0]*t[1,6] "
    "- 30*u[1,0]*u[1,1]^2*t[1,0]*t[1,7] + "
    "260*u[1,0]^2*u[1,2]*t[1,0]*t[1,7] + 8*u[1,0]^3*t[1,0]*t[1,7] + "
    "64*u[1,0]^2*u[1,1]*t[1,0]*t[1,8] + 8*u[1,0]^3*t[1,0]*t[1,9] + "
    "134*u[1,0]*u[1,1]*u[1,3]*t[1,1]*t[1,2] + "
    "232*u[1,0]*u[1,1]*u[1,5]*t[1,1]*t[1,2] + "
    "30*u[1,0]*u[1,1]^2*t[1,1]*t[1,2] - "
    "268*u[1,0]*u[1,2]*u[1,4]*t[1,1]*t[1,2] - "
    "72*u[1,0]*u[1,2]^2*t[1,1]*t[1,2] + 140*u[1,0]*u[1,3]^2*t[1,1]*t[1,2] "
    "- 52*u[1,0]^2*u[1,2]*t[1,1]*t[1,2] - "
    "104*u[1,0]^2*u[1,4]*t[1,1]*t[1,2] - "
    "172*u[1,0]^2*u[1,6]*t[1,1]*t[1,2] - 8*u[1,0]^3*t[1,1]*t[1,2] + "
    "40*u[1,0]*u[1,1]*u[1,2]*t[1,1]*t[1,3] + "
    "216*u[1,0]*u[1,1]*u[1,4]*t[1,1]*t[1,3] - "
    "80*u[1,0]*u[1,2]*u[1,3]*t[1,1]*t[1,3] - "
    "16*u[1,0]^2*u[1,1]*t[1,1]*t[1,3] - 100*u[1,0]^2*u[1,3]*t[1,1]*t[1,3] "
    "- 280*u[1,0]^2*u[1,5]*t[1,1]*t[1,3] + "
    "420*u[1,0]*u[1,1]*u[1,3]*t[1,1]*t[1,4] + "
    "54*u[1,0]*u[1,1]^2*t[1,1]*t[1,4] - 200*u[1,0]*u[1,2]^2*t[1,1]*t[1,4] "
    "- 116*u[1,0]^2*u[1,2]*t[1,1]*t[1,4] - "
    "444*u[1,0]^2*u[1,4]*t[1,1]*t[1,4] - 8*u[1,0]^3*t[1,1]*t[1,4] + "
    "128*u[1,0]*u[1,1]*u[1,2]*t[1,1]*t[1,5] - "
    "32*u[1,0]^2*u[1,1]*t[1,1]*t[1,5] - 344*u[1,0]^2*u[1,3]*t[1,1]*t[1,5] "
    "+ 78*u[1,0]*u[1,1]^2*t[1,1]*t[1,6] - "
    "212*u[1,0]^2*u[1,2]*t[1,1]*t[1,6] - 8*u[1,0]^3*t[1,1]*t[1,6] - "
    "48*u[1,0]^2*u[1,1]*t[1,1]*t[1,7] - 8*u[1,0]^3*t[1,1]*t[1,8] - "
    "496*u[1,0]*u[1,1]*u[1,3]*t[1,2]*t[1,3] - "
    "70*u[1,0]*u[1,1]^2*t[1,2]*t[1,3] + 288*u[1,0]*u[1,2]^2*t[1,2]*t[1,3] "
    "+ 100*u[1,0]^2*u[1,2]*t[1,2]*t[1,3] + "
    "280*u[1,0]^2*u[1,4]*t[1,2]*t[1,3] + 8*u[1,0]^3*t[1,2]*t[1,3] - "
    "88*u[1,0]*u[1,1]*u[1,2]*t[1,2]*t[1,4] + "
    "16*u[1,0]^2*u[1,1]*t[1,2]*t[1,4] + 164*u[1,0]^2*u[1,3]*t[1,2]*t[1,4] "
    "- 110*u[1,0]*u[1,1]^2*t[1,2]*t[1,5] + "
    "180*u[1,0]^2*u[1,2]*t[1,2]*t[1,5] + 8*u[1,0]^3*t[1,2]*t[1,5] + "
    "32*u[1,0]^2*u[1,1]*t[1,2]*t[1,6] + 8*u[1,0]^3*t[1,2]*t[1,7] + "
    "126*u[1,0]*u[1,1]^2*t[1,3]*t[1,4] - "
    "164*u[1,0]^2*u[1,2]*t[1,3]*t[1,4] - 8*u[1,0]^3*t[1,3]*t[1,4] - "
    "16*u[1,0]^2*u[1,1]*t[1,3]*t[1,5] - 8*u[1,0]^3*t[1,3]*t[1,6] + "
    "8*u[1,0]^3*t[1,4]*t[1,5]";

// representatives of Q_2, Q_3 on the modified side (u here stands for the
// modified variable v); both map to their targets under u = v^2 + v_x
const char* const kS2Density =
    "-1/8*u[1,1]*z*t[1,0] + 1/8*u[1,0]^2*t[1,0]*t[1,1] - "
    "1/32*t[1,0]*t[1,3]";
const char* const kS3Density =
    "-3/8*u[1,0]^2*u[1,1]*z*t[1,0] + 1/16*u[1,3]*z*t[1,0] - "
    "1/16*u[1,0]*u[1,2]*t[1,0]*t[1,1] + 1/8*u[1,0]^4*t[1,0]*t[1,1] - "
    "1/8*u[1,0]*u[1,1]*t[1,0]*t[1,2] - 1/16*u[1,0]^2*t[1,0]*t[1,3] + "
    "1/128*t[1,0]*t[1,5]";

// ---------------------------------------------------------------------------
// operator presentations
// ---------------------------------------------------------------------------

OperatorMatrix kdv_operator(int k) {
    SuperPoly u = U(1, 0), u1 = U(1, 1), u2 = U(1, 2), u3 = U(1, 3),
              u4 = U(1, 4), u5 = U(1, 5);
    OperatorMatrix A = OperatorMatrix::zero(1);
    switch (k) {
        case 0:
            A.entries[0][0] = {{C(1), 1}};
            break;
        case 1:
            A.entries[0][0] = {{u, 1}, {C(1, 2) * u1, 0}, {C(-1, 4), 3}};
            break;
        case 2:
            A.entries[0][0] = {{u.pow(2), 1},      {u * u1, 0},
                               {C(-1, 2) * u, 3},  {C(-3, 4) * u1, 2},
                               {C(-1, 2) * u2, 1}, {C(-1, 8) * u3, 0},
                               {C(1, 16), 5}};
            A.tails = {{C(-1, 4) * u1, u1}};
            break;
        case 3:
            A.entries[0][0] = {
                {u.pow(3), 1},
                {C(3, 2) * u.pow(2) * u1, 0},
                {C(-3, 4) * u.pow(2), 3},
                {C(-9, 4) * u * u1, 2},
                {C(-3, 2) * u * u2 - C(17, 16) * u1.pow(2), 1},
                {C(-3, 8) * u * u3 - C(11, 16) * u1 * u2, 0},
                {C(3, 16) * u, 5},
                {C(15, 32) * u1, 4},
                {C(5, 8) * u2, 3},
                {C(15, 32) * u3, 2},
                {C(3, 16) * u4, 1},
                {C(1, 32) * u5, 0},
                {C(-1, 64), 7}};
            A.tails = {{C(-1, 16) * (C(6) * u * u1 - u3), u1},
                       {C(-1, 16) * u1, C(6) * u * u1 - u3}};
            break;
        default:
            throw std::invalid_argument("kdv operator index out of range");
    }
    return A;
}

OperatorMatrix ch_j0() {
    OperatorMatrix A = OperatorMatrix::zero(1);
    A.entries[0][0] = {{C(1), 1}, {C(-1), 3}};
    return A;
}

OperatorMatrix ch_j1() {
    OperatorMatrix A = OperatorMatrix::zero(1);
    A.entries[0][0] = {{U(1, 0), 1}, {C(1, 2) * U(1, 1), 0}};
    return A;
}

// every degree part of [X, Y] must integrate to zero through degree dmax
bool bracket_window_ok(const SuperPoly& X, const SuperPoly& Y, long dmax) {
    SuperPoly br = sn_bracket(X, Y, 1);
    for (long d = 0; d <= dmax; ++d) {
        SuperPoly part = br.degree_part(d);
        if (!part.is_zero() && !zero_test(part, 1)) return false;
    }
    return true;
}

// small exact linear algebra over the rationals
std::vector<std::vector<Rational>> invert_matrix(
    std::vector<std::vector<Rational>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<Rational>> inv(n,
                                           std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && a[p][c] == Rational(0)) ++p;
        if (p == n) throw DegenerateMetric("eta is not invertible");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rational s = Rational(1) / a[c][c];
        for (int j = 0; j < n; ++j) {
            a[c][j] *= s;
            inv[c][j] *= s;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || a[i][c] == Rational(0)) continue;
            Rational f = a[i][c];
            for (int j = 0; j < n; ++j) {
                a[i][j] -= f * a[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

// the constant value of a super-degree-0 order-0 expression; nullopt when it
// genuinely depends on the variables
std::optional<Rational> constant_value(const SuperPoly& f) {
    Rational c(0);
    for (const auto& [mon, cf] : f.terms()) {
        if (!mon.even.empty() || !mon.odd.empty()) return std::nullopt;
        c = cf;
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// recursion interface
// ---------------------------------------------------------------------------

OperatorMatrix ch_recursion(const OperatorMatrix& J,
                            const TruncationPolicy& pol) {
    return from_scalar(recursion_step(to_scalar(J, pol.max_degree)));
}

SuperPoly ch_bivector(const OperatorMatrix& A, const TruncationPolicy& pol) {
    return scalar_bivector(to_scalar(A, pol.max_degree));
}

// ---------------------------------------------------------------------------
// KdV and Camassa-Holm families
// ---------------------------------------------------------------------------

std::vector<NamedStructure> kdv_structures() {
    static const std::vector<NamedStructure> cache = [] {
        std::vector<NamedStructure> v;
        for (int k = 0; k <= 3; ++k) {
            NamedStructure s;
            s.label = "kdv.Q" + std::to_string(k);
            s.n = 1;
            s.density = bivector_from_operator(kdv_operator(k));
            s.note = "KdV structure, exact";
            if (!check_jacobi(s.density, 1))
                throw std::runtime_error(s.label + ": Jacobi identity failed");
            v.push_back(std::move(s));
        }
        for (std::size_t a = 0; a < v.size(); ++a)
            for (std::size_t b = a + 1; b < v.size(); ++b)
                if (!check_compatible(v[a].density, v[b].density, 1))
                    throw std::runtime_error(v[a].label + "/" + v[b].label +
                                             ": compatibility failed");
        return v;
    }();
    return cache;
}

std::vector<NamedStructure> ch_structures(const TruncationPolicy& pol) {
    if (pol.max_degree > 9)
        throw TruncationOverflow(
            "stored Camassa-Holm densities window through degree 9");
    static std::map<long, std::vector<NamedStructure>> cache;
    auto it = cache.find(pol.max_degree);
    if (it != cache.end()) return it->second;

    const TruncationPolicy p{pol.max_degree, false};
    std::vector<NamedStructure> v(4);
    v[0] = {"ch.K0", 1, C(1, 2) * T(1, 0) * T(1, 1) - C(1, 2) * T(1, 0) * T(1, 3),
            "Camassa-Holm structure, exact"};
    v[1] = {"ch.K1", 1, C(1, 2) * U(1, 0) * T(1, 0) * T(1, 1),
            "Camassa-Holm structure, exact"};
    v[2] = {"ch.K2", 1,
            C(4) * ch_bivector(ch_recursion(ch_j1(), p), p),
            "recursion applied to K1, formal series window"};
    v[3] = {"ch.K3", 1, truncate_degree(parse_expression(kK3Density, 1), p),
            "stored verified density, formal series window"};

    if (!check_jacobi(v[0].density, 1) || !check_jacobi(v[1].density, 1) ||
        !check_compatible(v[0].density, v[1].density, 1))
        throw std::runtime_error("ch.K0/ch.K1: exact identities failed");
    // the symbolic recursion must agree with the stored series for K2
    SuperPoly frozen2 = truncate_degree(parse_expression(kK2Density, 1), p);
    if (!zero_test(v[2].density - frozen2, 1))
        throw std::runtime_error(
            "ch.K2: recursion disagrees with the stored density");
    // one application of the recursion to the exact pair: R(J0) = J1
    {
        ScalarOp r = recursion_step(to_scalar(ch_j0(), p.max_degree));
        SuperPoly diff = scalar_bivector(r) -
                         scalar_bivector(to_scalar(ch_j1(), p.max_degree));
        if (!zero_test(diff, 1))
            throw std::runtime_error("ch recursion: R(J0) != J1");
    }
    // graded Jacobi and compatibility, degree by degree through the window
    for (const auto& [a, b] :
         std::vector<std::pair<int, int>>{{2, 2}, {3, 3}, {2, 3},
                                          {0, 2}, {1, 2}, {0, 3}, {1, 3}})
        if (!bracket_window_ok(v[a].density, v[b].density, p.max_degree))
            throw std::runtime_error("ch." + std::to_string(a) + "/" +
                                     std::to_string(b) +
                                     ": windowed bracket check failed");
    cache.emplace(pol.max_degree, v);
    return v;
}

// ---------------------------------------------------------------------------
// Frobenius potentials
// ---------------------------------------------------------------------------

FrobeniusPair frobenius_build(int n, const SuperPoly& F,
                              std::vector<Rational> deg,
                              std::vector<Rational> r, const Rational& d) {
    if (F.super_degree() != 0 || F.max_jet_order() != 0)
        throw std::invalid_argument(
            "the potential must be even in the order-0 variables");
    if (static_cast<int>(deg.size()) != n)
        throw std::invalid_argument("need one scaling degree per coordinate");
    if (r.empty()) r.assign(n, Rational(0));
    if (static_cast<int>(r.size()) != n)
        throw std::invalid_argument("need one Euler shift per coordinate");
    if (deg[0] != Rational(1))
        throw std::invalid_argument("normalization requires d_1 = 1");

    auto d3 = [&](int i, int j, int k) {
        return F.partial(Var::even(i, 0))
            .partial(Var::even(j, 0))
            .partial(Var::even(k, 0));
    };

    FrobeniusData data;
    data.n = n;
    data.F = F;
    data.deg = deg;
    data.r = r;
    data.d = d;
    data.eta.assign(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            auto c = constant_value(d3(1, i, j));
            if (!c)
                throw std::invalid_argument(
                    "eta = F_{1ij} is not constant: v^1 is not flat");
            data.eta[i - 1][j - 1] = *c;
        }
    data.eta_inv = invert_matrix(data.eta);

    // associativity: sum_m F_{ijm} eta^{mp} F_{pkl} symmetric in i <-> k
    for (int i = 1; i <= n; ++i)
        for (int k = i + 1; k <= n; ++k)
            for (int j = 1; j <= n; ++j)
                for (int l = 1; l <= n; ++l) {
                    SuperPoly lhs, rhs;
                    for (int m = 1; m <= n; ++m)
                        for (int q = 1; q <= n; ++q) {
                            SuperPoly e(data.eta_inv[m - 1][q - 1]);
                            lhs += d3(i, j, m) * e * d3(q, k, l);
                            rhs += d3(k, j, m) * e * d3(q, i, l);
                        }
                    if (!(lhs - rhs).is_zero())
                        throw WDVVViolation(
                            "associativity equations fail for the potential");
                }

    // Euler field and quasi-homogeneity up to quadratic terms
    data.E.resize(n);
    for (int i = 1; i <= n; ++i)
        data.E[i - 1] = SuperPoly(deg[i - 1]) * U(i, 0) + SuperPoly(r[i - 1]);
    {
        SuperPoly lie;
        for (int i = 1; i <= n; ++i)
            lie += data.E[i - 1] * F.partial(Var::even(i, 0));
        SuperPoly res = lie - SuperPoly(Rational(3) - d) * F;
        for (const auto& [mon, cf] : res.terms()) {
            Rational total(0);
            bool poly = true;
            for (const auto& [vv, e] : mon.even) {
                if (!is_integer(e) || e < 0) poly = false;
                total += e;
            }
            if (!poly || total > 2)
                throw NotQuasiHomogeneous(
                    "E(F) - (3 - d) F is not quadratic");
        }
    }

    // structure constants, intersection form, contravariant connection
    data.c.assign(n, std::vector<std::vector<SuperPoly>>(
                         n, std::vector<SuperPoly>(n)));
    data.g.assign(n, std::vector<SuperPoly>(n));
    Poly3 Gamma(n, std::vector<std::vector<SuperPoly>>(
                       n, std::vector<SuperPoly>(n)));
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                SuperPoly ckij;
                for (int l = 1; l <= n; ++l)
                    ckij += SuperPoly(data.eta_inv[k - 1][l - 1]) * d3(l, i, j);
                data.c[k - 1][i - 1][j - 1] = ckij;
            }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            SuperPoly gij;
            for (int k = 1; k <= n; ++k) {
                // c^{ij}_k = eta^{il} c^j_{lk}
                SuperPoly cijk;
                for (int l = 1; l <= n; ++l)
                    cijk += SuperPoly(data.eta_inv[i - 1][l - 1]) *
                            data.c[j - 1][l - 1][k - 1];
                gij += data.E[k - 1] * cijk;
                Rational mu_j = deg[j - 1] + d / Rational(2) - Rational(1);
                Gamma[i - 1][j - 1][k - 1] =
                    SuperPoly(Rational(1, 2) + mu_j) * cijk;
            }
            data.g[i - 1][j - 1] = gij;
        }

    FrobeniusPair fp;
    fp.data = std::move(data);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            fp.P1 += SuperPoly(fp.data.eta_inv[i - 1][j - 1] * Rational(1, 2)) *
                     T(i, 0) * T(j, 1);
    HydroStructure h;
    h.n = n;
    h.g = fp.data.g;
    h.Gamma = std::move(Gamma);
    h.V.assign(n, std::vector<SuperPoly>(n, SuperPoly()));
    fp.P2 = hydro_bivector(h);

    if (!check_fera(h).holds())
        throw std::runtime_error("flat-pencil conditions failed");
    if (!check_jacobi(fp.P2, n) || !check_compatible(fp.P1, fp.P2, n))
        throw std::runtime_error("Jacobi or compatibility check failed");
    return fp;
}

InversionReport frobenius_inversion(const FrobeniusPair& fp) {
    const int n = fp.data.n;
    for (const auto& s : fp.data.r)
        if (s != Rational(0))
            throw std::invalid_argument(
                "inversion requires a vanishing Euler shift");
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (fp.data.eta[i - 1][j - 1] !=
                Rational(i + j == n + 1 ? 1 : 0))
                throw std::invalid_argument(
                    "inversion requires eta in antidiagonal form");

    InversionReport rep;
    SuperPoly vn_inv = SuperPoly::even_pow(n, 0, Rational(-1));
    // forward coordinates: vt^1 = (1/2) eta_{kl} v^k v^l / v^n,
    // vt^i = v^i / v^n for 1 < i < n, vt^n = -1 / v^n
    rep.vt.resize(n);
    {
        SuperPoly quad;  // (1/2) eta_{kl} v^k v^l with the v^1 v^n part split
        for (int a = 2; a <= n - 1; ++a)
            quad += C(1, 2) * U(a, 0) * U(n + 1 - a, 0);
        rep.vt[0] = U(1, 0) + quad * vn_inv;
        for (int a = 2; a <= n - 1; ++a) rep.vt[a - 1] = U(a, 0) * vn_inv;
        rep.vt[n - 1] = C(-1) * vn_inv;
    }
    // backward: v^n = -1/vt^n, v^i = -vt^i/vt^n,
    // v^1 = vt^1 + (1/2) eta_{ab} vt^a vt^b / vt^n over the middle block
    rep.vback.resize(n);
    {
        SuperPoly quad;
        for (int a = 2; a <= n - 1; ++a)
            quad += C(1, 2) * U(a, 0) * U(n + 1 - a, 0);
        rep.vback[0] = U(1, 0) + quad * vn_inv;
        for (int a = 2; a <= n - 1; ++a)
            rep.vback[a - 1] = C(-1) * U(a, 0) * vn_inv;
        rep.vback[n - 1] = C(-1) * vn_inv;
    }
    MiuraMap inv_map = make_miura(n, rep.vt, rep.vback);

    // transformed potential in the tilde coordinates
    {
        std::map<int, SuperPoly> back;
        for (int i = 1; i <= n; ++i) back.emplace(i, rep.vback[i - 1]);
        SuperPoly quad_t;
        for (int k = 1; k <= n; ++k)
            quad_t += C(1, 2) * U(k, 0) * U(n + 1 - k, 0);
        rep.Ft = SuperPoly::even_pow(n, 0, Rational(2)) *
                     fp.data.F.substitute_even(back) +
                 U(1, 0) * quad_t;
    }
    rep.dt = Rational(2) - fp.data.d;
    std::vector<Rational> dt(n);
    dt[0] = Rational(1);
    for (int a = 2; a <= n - 1; ++a)
        dt[a - 1] = fp.data.deg[a - 1] - fp.data.deg[n - 1];
    if (n > 1) dt[n - 1] = -fp.data.deg[n - 1];
    rep.image = frobenius_build(n, rep.Ft, dt, {}, rep.dt);

    // reciprocal step with rho = v^n, then the pointwise coordinate change
    const TruncationPolicy pol{6, false};
    LocalityWitness w1 = check_locality(fp.P1, U(n, 0), n, pol);
    LocalityWitness w2 = check_locality(fp.P2, U(n, 0), n, pol);
    if (w1.local && w1.density)
        rep.p1_matches =
            zero_test(miura_transform(*w1.density, inv_map) - rep.image.P1, n);
    if (w2.local && w2.density)
        rep.p2_matches =
            zero_test(miura_transform(*w2.density, inv_map) - rep.image.P2, n);
    return rep;
}

// ---------------------------------------------------------------------------
// the modified-KdV bridge
// ---------------------------------------------------------------------------

MkdvBridge mkdv_bridge() {
    MkdvBridge b;
    b.miura = make_miura(1, {U(1, 0).pow(2) + U(1, 1)});
    b.rho2v = make_reciprocal(1, C(2) * U(1, 0));
    b.S2 = parse_expression(kS2Density, 1);
    b.S3 = parse_expression(kS3Density, 1);

    auto kdv = kdv_structures();
    if (!miura_matches(b.S2, kdv[2].density, b.miura) ||
        !miura_matches(b.S3, kdv[3].density, b.miura))
        throw std::runtime_error(
            "modified-side representatives do not match their targets");

    const TruncationPolicy pol{6, false};
    const std::vector<std::pair<SuperPoly, Rational>> rhos = {
        {C(1), Rational(0)}, {U(1, 0), Rational(1)},
        {U(1, 0).pow(2), Rational(2)}};
    for (int k = 0; k <= 3; ++k) {
        for (const auto& [rho, kappa] : rhos) {
            KappaVerdict verdict;
            verdict.structure = "Q" + std::to_string(k);
            verdict.rho = rho.str();
            verdict.kappa = kappa;
            // failing the conservation half of the criterion is already a
            // nonlocality verdict
            try {
                verdict.local =
                    check_locality(kdv[k].density, rho, 1, pol).local;
            } catch (const NotConserved&) {
                verdict.local = false;
            }
            b.table.push_back(std::move(verdict));
        }
    }
    for (const auto& [name, S] :
         std::vector<std::pair<std::string, SuperPoly>>{{"Q2", b.S2},
                                                        {"Q3", b.S3}}) {
        KappaVerdict verdict;
        verdict.structure = name;
        verdict.rho = "2*v";
        verdict.kappa = Rational(1, 2);
        verdict.local = check_locality(S, C(2) * U(1, 0), 1, pol).local;
        b.table.push_back(std::move(verdict));
    }
    return b;
}

// ---------------------------------------------------------------------------
// catalog access
// ---------------------------------------------------------------------------

std::vector<NamedStructure> catalog_entries() {
    std::vector<NamedStructure> v = kdv_structures();
    for (auto& s : ch_structures()) v.push_back(s);
    v.push_back({"mkdv.S2", 1, parse_expression(kS2Density, 1),
                 "modified-side representative of kdv.Q2"});
    v.push_back({"mkdv.S3", 1, parse_expression(kS3Density, 1),
                 "modified-side representative of kdv.Q3"});
    return v;
}

NamedStructure catalog_lookup(const std::string& label) {
    for (auto& s : catalog_entries())
        if (s.label == label) return s;
    throw std::invalid_argument("unknown catalog label: " + label);
}

}  // namespace jacobi
