#pragma once
// Exact linear algebra over Q and Z.

#include "mf/core.hpp"

#include <optional>

namespace mf {

Rat dot(const QVec& a, const QVec& b);
QVec add(const QVec& a, const QVec& b);
QVec sub(const QVec& a, const QVec& b);
QVec scale(const QVec& a, const Rat& k);
bool is_zero(const QVec& a);

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(QMat& A);
int rank(QMat A);
// basis of {x : A x = 0}; ncols needed when A has no rows
QMat nullspace(const QMat& A, int ncols);
// some x with A x = b
std::optional<QVec> solve(const QMat& A, const QVec& b);
Rat det(QMat A);
std::optional<QMat> inverse(const QMat& A);
QMat transpose(const QMat& A);
QMat matmul(const QMat& A, const QMat& B);
QVec matvec(const QMat& A, const QVec& x);
// indices of a maximal linearly independent subset of rows (greedy, in order)
std::vector<int> independent_rows(const QMat& A);

// T = e_{i1 j1}(q1) ... e_{im jm}(qm) for T in SL_k(Q)
struct ElemOp {
    int i, j;
    Rat q;
};
std::vector<ElemOp> elementary_factor_sl(QMat T);
QMat eval_elem_ops(const std::vector<ElemOp>& ops, int k);

// positive multiple that is a primitive integer vector
QVec primitive(const QVec& v);

// Integer lattices. Rows generate the lattice.
using ZVec = std::vector<Int>;
using ZMat = std::vector<ZVec>;

// Row Hermite normal form basis of the row lattice (zero rows dropped).
ZMat hnf_basis(ZMat rows);
// Solve x B = v over Z (B rows a basis); nullopt if v is not in the lattice.
std::optional<ZVec> lattice_coords(const ZMat& basis, const ZVec& v);
Int zdet(const ZMat& A);
Int gcd_all(const ZVec& v);
QVec to_qvec(const ZVec& v);

}  // namespace mf
