#include "mf/matgroups.hpp"

#include <map>

namespace mf {

RingMatrix::RingMatrix(int r, int n, int c, Field f) : r_(r), n_(n), c_(c), f_(f) {
    if (r < 1) throw PreconditionError("matrix size must be positive");
    e_.assign(static_cast<size_t>(r * r), RingElem(n, c, f));
}

RingMatrix RingMatrix::identity(int r, int n, int c, Field f) {
    RingMatrix M(r, n, c, f);
    for (int i = 0; i < r; ++i) M.at(i, i) = RingElem::constant(n, c, 1, f);
    return M;
}

void RingMatrix::check_compat(const RingMatrix& o) const {
    if (r_ != o.r_) throw PreconditionError("matrix size mismatch");
    if (n_ != o.n_ || c_ != o.c_ || f_ != o.f_) throw PreconditionError("matrix ring mismatch");
}

RingMatrix RingMatrix::operator*(const RingMatrix& o) const {
    check_compat(o);
    RingMatrix P(r_, n_, c_, f_);
    for (int i = 0; i < r_; ++i)
        for (int k = 0; k < r_; ++k) {
            const RingElem& a = at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < r_; ++j) {
                const RingElem& b = o.at(k, j);
                if (!b.is_zero()) P.at(i, j) += a * b;
            }
        }
    return P;
}

RingMatrix RingMatrix::operator+(const RingMatrix& o) const {
    check_compat(o);
    RingMatrix P = *this;
    for (size_t i = 0; i < e_.size(); ++i) P.e_[i] += o.e_[i];
    return P;
}

RingMatrix RingMatrix::operator-(const RingMatrix& o) const {
    check_compat(o);
    RingMatrix P = *this;
    for (size_t i = 0; i < e_.size(); ++i) P.e_[i] -= o.e_[i];
    return P;
}

bool RingMatrix::operator==(const RingMatrix& o) const {
    return r_ == o.r_ && n_ == o.n_ && c_ == o.c_ && f_ == o.f_ && e_ == o.e_;
}

bool RingMatrix::is_identity() const {
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j)
            if (i == j ? !at(i, j).is_one() : !at(i, j).is_zero()) return false;
    return true;
}

bool RingMatrix::is_zero() const {
    for (const auto& x : e_)
        if (!x.is_zero()) return false;
    return true;
}

bool RingMatrix::is_diagonal() const {
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j)
            if (i != j && !at(i, j).is_zero()) return false;
    return true;
}

std::string RingMatrix::str() const {
    std::string s = "[";
    for (int i = 0; i < r_; ++i) {
        if (i) s += "; ";
        for (int j = 0; j < r_; ++j) {
            if (j) s += ", ";
            s += at(i, j).str();
        }
    }
    return s + "]";
}

RingMatrix mat_mul(const RingMatrix& A, const RingMatrix& B) {
    return A * B;
}

RingElem det(const RingMatrix& A) {
    int r = A.size();
    // minors of the last (r - k) rows indexed by the set of their columns
    std::map<uint32_t, RingElem> cur;
    cur[0] = RingElem::constant(A.dim(), A.base(), 1, A.field());
    for (int row = r - 1; row >= 0; --row) {
        std::map<uint32_t, RingElem> next;
        for (const auto& [mask, minor] : cur) {
            if (minor.is_zero()) continue;
            int pos = 0;  // used columns left of j: the index of j in the new column set
            for (int j = 0; j < r; ++j) {
                if (mask & (1u << j)) {
                    ++pos;
                    continue;
                }
                const RingElem& a = A.at(row, j);
                if (a.is_zero()) continue;
                RingElem t = a * minor;
                if (pos % 2) t = -t;
                uint32_t nm = mask | (1u << j);
                auto it = next.find(nm);
                if (it == next.end())
                    next.emplace(nm, t);
                else
                    it->second += t;
            }
        }
        cur = std::move(next);
    }
    auto it = cur.find((r >= 32) ? 0xffffffffu : ((1u << r) - 1));
    if (it == cur.end()) return RingElem(A.dim(), A.base(), A.field());
    return it->second;
}

bool is_SL(const RingMatrix& A) {
    return det(A).is_one();
}

RingMatrix mat_frobenius(const RingMatrix& A, int j) {
    RingMatrix B(A.size(), A.dim(), A.base(), A.field());
    for (int i = 0; i < A.size(); ++i)
        for (int k = 0; k < A.size(); ++k) B.at(i, k) = frobenius(A.at(i, k), j);
    return B;
}

std::set<ExpVec> mat_support(const RingMatrix& A) {
    std::set<ExpVec> s;
    for (int i = 0; i < A.size(); ++i)
        for (int k = 0; k < A.size(); ++k)
            for (const auto& t : A.at(i, k).terms()) s.insert(t.first);
    return s;
}

RingMatrix a_matrix(int r, int p, int q, const RingElem& lambda) {
    RingMatrix M(r, lambda.dim(), lambda.base(), lambda.field());
    M.at(p - 1, q - 1) = lambda;
    return M;
}

RingMatrix elementary(int r, int p, int q, const RingElem& lambda) {
    if (p == q || p < 1 || q < 1 || p > r || q > r) throw PreconditionError("bad elementary matrix indices");
    RingMatrix M = RingMatrix::identity(r, lambda.dim(), lambda.base(), lambda.field());
    M.at(p - 1, q - 1) = lambda;
    return M;
}

void right_mul_elementary(RingMatrix& M, int p, int q, const RingElem& lambda) {
    if (lambda.is_zero()) return;
    for (int i = 0; i < M.size(); ++i) {
        const RingElem& a = M.at(i, p - 1);
        if (!a.is_zero()) M.at(i, q - 1) += a * lambda;
    }
}

void left_mul_elementary(RingMatrix& M, int p, int q, const RingElem& lambda) {
    if (lambda.is_zero()) return;
    for (int j = 0; j < M.size(); ++j) {
        const RingElem& a = M.at(q - 1, j);
        if (!a.is_zero()) M.at(p - 1, j) += lambda * a;
    }
}

void check_word(const ElemWord& w, int r) {
    for (const auto& f : w)
        if (f.p == f.q || f.p < 1 || f.q < 1 || f.p > r || f.q > r)
            throw PreconditionError("elementary factor e_" + std::to_string(f.p) + std::to_string(f.q) + " out of range");
}

RingMatrix word_eval(const ElemWord& w, int r, int n, int c, Field f) {
    check_word(w, r);
    RingMatrix M = RingMatrix::identity(r, n, c, f);
    for (const auto& x : w) right_mul_elementary(M, x.p, x.q, x.lambda);
    return M;
}

ElemWord word_inverse(const ElemWord& w) {
    ElemWord out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->p, it->q, -it->lambda});
    return out;
}

ElemWord word_frobenius(const ElemWord& w, int j) {
    ElemWord out;
    out.reserve(w.size());
    for (const auto& x : w) out.push_back({x.p, x.q, frobenius(x.lambda, j)});
    return out;
}

ElemWord word_concat(const ElemWord& a, const ElemWord& b) {
    ElemWord out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

RingMatrix steinberg_eval(const SteinbergWord& w, int r, int n, int c, Field f) {
    RingMatrix M = RingMatrix::identity(r, n, c, f);
    for (const auto& x : w) {
        if (x.p == x.q || x.p < 1 || x.q < 1 || x.p > r || x.q > r) throw PreconditionError("Steinberg generator out of range");
        right_mul_elementary(M, x.p, x.q, x.inverse ? -x.lambda : x.lambda);
    }
    return M;
}

std::pair<SteinbergWord, SteinbergWord> steinberg_sides(const SteinbergRelation& rel, int r) {
    auto in_range = [&](int i) { return i >= 1 && i <= r; };
    const auto& L = rel.lambda;
    const auto& U = rel.mu;
    switch (rel.kind) {
    case SteinbergKind::Additive:
        if (rel.p == rel.q || !in_range(rel.p) || !in_range(rel.q)) throw PreconditionError("Steinberg relation: bad indices");
        return {{{rel.p, rel.q, L, false}, {rel.p, rel.q, U, false}}, {{rel.p, rel.q, L + U, false}}};
    case SteinbergKind::Commutator:
        if (rel.p == rel.q || rel.q == rel.u || rel.p == rel.u || !in_range(rel.p) || !in_range(rel.q) || !in_range(rel.u))
            throw PreconditionError("Steinberg relation: need p, q, u distinct");
        return {{{rel.p, rel.q, L, false}, {rel.q, rel.u, U, false}, {rel.p, rel.q, L, true}, {rel.q, rel.u, U, true}},
                {{rel.p, rel.u, L * U, false}}};
    case SteinbergKind::Commuting:
        if (rel.p == rel.q || rel.u == rel.v || rel.p == rel.v || rel.q == rel.u)
            throw PreconditionError("Steinberg relation: need p != v and q != u");
        if (!in_range(rel.p) || !in_range(rel.q) || !in_range(rel.u) || !in_range(rel.v))
            throw PreconditionError("Steinberg relation: bad indices");
        return {{{rel.p, rel.q, L, false}, {rel.u, rel.v, U, false}, {rel.p, rel.q, L, true}, {rel.u, rel.v, U, true}}, {}};
    }
    throw Error("unknown Steinberg relation");
}

bool steinberg_check(const SteinbergRelation& rel, int r) {
    auto [lhs, rhs] = steinberg_sides(rel, r);
    int n = rel.lambda.dim(), c = rel.lambda.base();
    Field f = rel.lambda.field();
    return steinberg_eval(lhs, r, n, c, f) == steinberg_eval(rhs, r, n, c, f);
}

bool in_B_prime(const RingElem& g, const Rat& eps, const Rat& l, const Hyperplane& G) {
    Rat l2 = l * l;
    for (const auto& [u, a] : g.terms()) {
        if (sq_norm(u) < l2) return false;
        if (u.is_zero()) return false;
        auto p = phi_image(u, G);
        if (!p || p->back() < eps) return false;
    }
    return true;
}

bool class_check(const RingMatrix& A, const ClassSpec& spec) {
    int r = A.size();
    switch (spec.kind) {
    case MatClass::A:
        for (const auto& u : mat_support(A))
            if (u.is_zero() || nth_coord(u) < spec.eps) return false;
        return true;
    case MatClass::B:
        if (!spec.G) throw PreconditionError("class B needs the cross-section hyperplane");
        if (spec.l <= 0) throw PreconditionError("class B needs l > 0");
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                if (!in_B_prime(A.at(i, j), spec.eps, spec.l, *spec.G)) return false;
        return true;
    case MatClass::D:
        if (!A.is_diagonal()) return false;
        for (const auto& u : mat_support(A))
            if (u.is_zero() || nth_coord(u) < 0) return false;
        return true;
    case MatClass::Dpos:
        if (!A.is_diagonal()) return false;
        for (const auto& u : mat_support(A))
            if (nth_coord(u) <= 0) return false;
        return true;
    }
    return false;
}

}  // namespace mf
