#pragma once
// Square matrices over k[M^{c^{-j}}], elementary words and Steinberg relations.

#include "mf/algebra.hpp"

namespace mf {

class RingMatrix {
public:
    RingMatrix() = default;
    RingMatrix(int r, int n, int c, Field f = {});
    static RingMatrix identity(int r, int n, int c, Field f = {});

    int size() const { return r_; }
    int dim() const { return n_; }
    int base() const { return c_; }
    const Field& field() const { return f_; }

    // 0-based indices
    RingElem& at(int i, int j) { return e_[static_cast<size_t>(i * r_ + j)]; }
    const RingElem& at(int i, int j) const { return e_[static_cast<size_t>(i * r_ + j)]; }

    RingMatrix operator*(const RingMatrix& o) const;
    RingMatrix operator+(const RingMatrix& o) const;
    RingMatrix operator-(const RingMatrix& o) const;
    bool operator==(const RingMatrix& o) const;
    bool operator!=(const RingMatrix& o) const { return !(*this == o); }
    bool is_identity() const;
    bool is_zero() const;
    bool is_diagonal() const;
    std::string str() const;

private:
    void check_compat(const RingMatrix& o) const;

    int r_ = 0, n_ = 1, c_ = 2;
    Field f_;
    std::vector<RingElem> e_;
};

RingMatrix mat_mul(const RingMatrix& A, const RingMatrix& B);
// Laplace expansion memoized over column subsets; exact for any r
RingElem det(const RingMatrix& A);
bool is_SL(const RingMatrix& A);
RingMatrix mat_frobenius(const RingMatrix& A, int j);
std::set<ExpVec> mat_support(const RingMatrix& A);

// e_{pq}(λ) with 1-based p != q
struct ElemFactor {
    int p = 1, q = 2;
    RingElem lambda;
    bool operator==(const ElemFactor& o) const { return p == o.p && q == o.q && lambda == o.lambda; }
};
using ElemWord = std::vector<ElemFactor>;

// the matrix a_{pq}(λ): λ at (p,q), zero elsewhere
RingMatrix a_matrix(int r, int p, int q, const RingElem& lambda);
RingMatrix elementary(int r, int p, int q, const RingElem& lambda);
// product of the factors from left to right; the identity for the empty word
RingMatrix word_eval(const ElemWord& w, int r, int n, int c, Field f = {});
// M * e_{pq}(λ) in place (column q += λ column p)
void right_mul_elementary(RingMatrix& M, int p, int q, const RingElem& lambda);
// e_{pq}(λ) * M in place (row p += λ row q)
void left_mul_elementary(RingMatrix& M, int p, int q, const RingElem& lambda);
ElemWord word_inverse(const ElemWord& w);
ElemWord word_frobenius(const ElemWord& w, int j);
ElemWord word_concat(const ElemWord& a, const ElemWord& b);
void check_word(const ElemWord& w, int r);

// Formal Steinberg generators x_{pq}(λ) and their inverses.
struct SteinbergGen {
    int p = 1, q = 2;
    RingElem lambda;
    bool inverse = false;
};
using SteinbergWord = std::vector<SteinbergGen>;
RingMatrix steinberg_eval(const SteinbergWord& w, int r, int n, int c, Field f = {});

enum class SteinbergKind {
    Additive,     // x_pq(λ) x_pq(μ) = x_pq(λ+μ)
    Commutator,   // [x_pq(λ), x_qu(μ)] = x_pu(λμ), p != u
    Commuting,    // [x_pq(λ), x_uv(μ)] = 1, p != v, q != u
};
struct SteinbergRelation {
    SteinbergKind kind = SteinbergKind::Additive;
    int p = 1, q = 2, u = 3, v = 4;
    RingElem lambda, mu;
};
// both sides of the relation as words (lhs, rhs); throws on side-condition violations
std::pair<SteinbergWord, SteinbergWord> steinberg_sides(const SteinbergRelation& rel, int r);
bool steinberg_check(const SteinbergRelation& rel, int r);

// The matrix classes A(ε), B(ε,l), D and D_{>0}.
enum class MatClass { A, B, D, Dpos };
struct ClassSpec {
    MatClass kind = MatClass::A;
    Rat eps = 0;
    Rat l = 1;
    // needed by B, whose condition is on the n-th coordinate of Φ-images
    std::optional<Hyperplane> G;
};
// B'(ε,l): every support monomial μ has |μ| >= l and Φ(μ)_n >= ε
bool in_B_prime(const RingElem& g, const Rat& eps, const Rat& l, const Hyperplane& G);
bool class_check(const RingMatrix& A, const ClassSpec& spec);

}  // namespace mf
