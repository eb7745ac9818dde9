#pragma once
// Commuting rules for elementary matrices and almost separation along a cut.
//
// The rewriting engine works in normalized coordinates: gp(M) = Z^n, the cut
// is x_n = 0 and the cross-section is g.x = g0 with g0 > 0. SeparationProblem
// owns the change of coordinates; certificates are stated in the caller's
// coordinates.

#include "mf/matgroups.hpp"
#include "mf/monoids.hpp"

namespace mf {

// Metric and cross-section data used by the class tests of the commuting rules.
struct SepGeometry {
    int n = 2;
    QVec g;         // cross-section functional, positive on the cone minus 0
    Rat g0 = 1;     // level, positive
    QMat gram;      // Q(u) = u^T gram u, nonnegative on pairs of cone vectors
    Rat lip2 = 1;   // max over extreme rays of Q(r) / g(r)^2

    // Euclidean metric when the cone is acute, otherwise |x|^2 + K^2 deg(x)^2
    // with the least integer K making the extreme rays pairwise Q-acute.
    static SepGeometry make(const Cone& C, const Hyperplane& G);

    Rat q_norm2(const ExpVec& u) const;
    // n-th coordinate of the cross-section image, g0 u_n / g(u)
    Rat phi_n(const ExpVec& u) const;
    // u != 0, Q(u) >= l^2 and phi_n(u) >= eps
    bool b_prime(const ExpVec& u, const Rat& eps, const Rat& l) const;
    bool b_prime(const RingElem& x, const Rat& eps, const Rat& l) const;
};

// l such that left/right multiplication by matrices with support n-coordinates
// >= -eps1 maps B(-eps2, l) into B(-eps2 - eps, l). eps2 does not enter the bound.
Rat l_bound(const Rat& eps1, const Rat& eps2, const Rat& eps, const SepGeometry& geo);

// 1 + A + B + D split by the class rules: off-diagonal terms go to A when
// n >= eps1, otherwise to B when they pass B'(-eps, l); diagonal terms go to D
// when n >= 0, otherwise to B. Throws Error when a term fits nowhere.
struct ClassSplit {
    RingMatrix A, B, D;
};
ClassSplit split_classes(const RingMatrix& X, const Rat& eps1, const Rat& eps, const Rat& l, const SepGeometry& geo);

struct Com1Result {
    RingElem gamma;
    RingMatrix A, B, D;
    int iterations = 0;
};
// (e_ji(beta) + D) e_ij(alpha) = e_ij(alpha) e_ij(gamma) (1 + A + B + D').
// alpha is a nonzero term with |alpha_n| < eps1; beta has every term with
// n >= eps1 (a single term in the classical statement, zero allowed).
Com1Result com1(int i, int j, const RingElem& alpha, const RingElem& beta, const RingMatrix& D, const Rat& eps1,
                const Rat& eps, const Rat& l, const SepGeometry& geo, int max_iter = 10000);

struct Com2Result {
    ElemWord E;
    RingMatrix A, B, D;
    int rounds = 0;
};
// E (1 + A + B) = 1 + A' + B' + D' with every factor of E having 0 <= n < eps1.
Com2Result com2(const RingMatrix& A, const RingMatrix& B, const Rat& eps1, const Rat& eps, const Rat& l,
                const SepGeometry& geo, int max_rounds = 10000);
// the same starting from X = 1 + A + B given as one matrix
Com2Result com2_matrix(const RingMatrix& X, const Rat& eps1, const Rat& eps, const Rat& l, const SepGeometry& geo,
                       int max_rounds = 10000);

struct Com3Result {
    ElemWord E;
    RingMatrix A, B, D;
};
// (1 + A + B + D) e_ij(alpha) = e_ij(alpha) E (1 + A1 + B1 + D1)
Com3Result com3(int i, int j, const RingElem& alpha, const RingMatrix& A, const RingMatrix& B, const RingMatrix& D,
                const Rat& eps1, const Rat& eps2, const Rat& eps, const Rat& l, const SepGeometry& geo,
                int max_iter = 10000);
// the same with S = 1 + A + B + D given as one matrix
Com3Result com3_matrix(int i, int j, const RingElem& alpha, const RingMatrix& S, const Rat& eps1, const Rat& eps2,
                       const Rat& eps, const Rat& l, const SepGeometry& geo, int max_iter = 10000);

// u is a sum of elements of S (with repetition); 0 counts as the empty sum
bool generated_by(const std::set<ExpVec>& S, const ExpVec& u, long budget = 200000);

// Splits every factor into single-term factors (same product).
ElemWord split_terms(const ElemWord& w);

struct SeparationConfig {
    int max_frobenius = 12;      // largest j tried by the length condition
    bool allow_roots = true;     // false: j stays at the input level, no fractional decompositions
    int decomposition_depth = 30;
    int com_iterations = 10000;
    int main_iterations = 100000;
    long max_word_length = 2000000;
    // progress messages of the main loop, when set
    std::function<void(const std::string&)> log;
};

struct SupportWitness {
    ExpVec u;      // caller coordinates
    int side = 1;  // 1 or 2
    Rat dist2;     // squared distance from its cross-section image to the side
};

struct SeparationCertificate {
    int j_A = 0;
    ElemWord A1;
    RingMatrix A2;
    std::vector<SupportWitness> witnesses;
    // diagnostics
    int frobenius = 0;  // level used internally
    int iterations = 0;
    int com3_calls = 0;
};

class SeparationProblem {
public:
    // M of full rank and normal; H linear (level 0) meeting the interior of the
    // cone; G a cross-section hyperplane; eps > 0; r >= 2.
    SeparationProblem(const AffineMonoid& M, const Hyperplane& H, const Hyperplane& G, const Rat& eps, int r,
                      Field f = {});

    const AffineMonoid& monoid() const { return M_; }
    const Hyperplane& cut() const { return H_; }
    const Hyperplane& section() const { return G_; }
    const Rat& eps() const { return eps_; }
    int size() const { return r_; }
    const Field& field() const { return f_; }

    // normalized coordinates
    const AffineMonoid& internal_monoid() const { return Mi_; }
    const SepGeometry& geometry() const { return geo_; }
    // slack on the n-th cross-section coordinate that keeps B-class terms in C2(eps)
    const Rat& eps_internal() const { return eps_int_; }

    ExpVec to_internal(const ExpVec& x) const;
    ExpVec to_original(const ExpVec& z) const;
    QVec to_original(const QVec& z) const;
    RingElem to_internal(const RingElem& g) const;
    RingElem to_original(const RingElem& g) const;
    ElemWord to_internal(const ElemWord& w) const;
    ElemWord to_original(const ElemWord& w) const;
    RingMatrix to_original(const RingMatrix& A) const;

    // x (caller coordinates) in (M_side(eps)_*)^{c^{-inf}}; dist2 receives the squared distance
    bool side_contains(int side, const ExpVec& x, Rat* dist2 = nullptr) const;
    // squared distance from the cross-section image of a cone point to that of C_side
    Rat side_sq_distance(int side, const QVec& x) const;

private:
    AffineMonoid M_, Mi_;
    Hyperplane H_, G_;
    Rat eps_, eps_int_;
    int r_;
    Field f_;
    QMat T_, Tinv_;  // z = x T, x = z Tinv (row vectors)
    SepGeometry geo_;
    std::shared_ptr<EpsNeighborhood> nb1_, nb2_;
};

// Normalization of an input word (internal coordinates): single
// terms, integral n-coordinates, negative n-coordinates equal to -1 and the
// length condition for positive ones. Returns j and the new word, whose product
// is the c^j Frobenius image of the input product.
struct GoodRep {
    int j = 0;
    ElemWord word;
};
GoodRep goodrep_normalize(const ElemWord& w, const SeparationProblem& P, const SeparationConfig& cfg = {});
// the length condition for one internal monomial with positive n-coordinate
bool length_condition(const ExpVec& z, const SeparationProblem& P);

// input word in caller coordinates over k[(M_*)^{c^{-j0}}]
SeparationCertificate almost_separate(const SeparationProblem& P, const ElemWord& w, const SeparationConfig& cfg = {});

struct CheckResult {
    bool ok = true;
    std::string failure;  // first violated invariant
};
CheckResult verify_separation(const SeparationProblem& P, const ElemWord& input, const SeparationCertificate& cert);

}  // namespace mf
