#include "mf/separation.hpp"

#include <algorithm>
#include <unordered_set>

namespace mf {

namespace {

Rat qform(const QMat& gram, const QVec& u, const QVec& v) {
    Rat s = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0) continue;
        for (size_t j = 0; j < v.size(); ++j)
            if (v[j] != 0) s += u[i] * gram[i][j] * v[j];
    }
    return s;
}

bool is_term(const RingElem& x) {
    return x.size() == 1;
}

RingMatrix ident_like(const RingMatrix& A) {
    return RingMatrix::identity(A.size(), A.dim(), A.base(), A.field());
}

std::string pair_str(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_indices(int i, int j, int r) {
    if (i == j || i < 1 || j < 1 || i > r || j > r) throw PreconditionError("bad index pair " + pair_str(i, j));
}

}  // namespace

// ---------------------------------------------------------------------------
// geometry

SepGeometry SepGeometry::make(const Cone& C, const Hyperplane& G) {
    SepGeometry geo;
    geo.n = C.ambient_dim();
    if (C.dim() != geo.n) throw PreconditionError("separation geometry needs a full-dimensional cone");
    if (G.level == 0) throw PreconditionError("cross-section hyperplane passes through the origin");
    geo.g = G.a;
    geo.g0 = G.level;
    if (geo.g0 < 0) {
        geo.g = scale(geo.g, Rat(-1));
        geo.g0 = -geo.g0;
    }
    const QMat& rays = C.rays();
    for (const auto& r : rays)
        if (dot(geo.g, r) <= 0) throw PreconditionError("cross-section functional is not positive on the cone");

    // degree functional for the metric correction
    QVec f(geo.n, Rat(0));
    for (const auto& a : C.facet_normals()) f = add(f, a);
    Rat need = 0;  // K^2 must be at least this
    for (size_t i = 0; i < rays.size(); ++i)
        for (size_t j = i + 1; j < rays.size(); ++j) {
            Rat ip = dot(rays[i], rays[j]);
            if (ip < 0) need = std::max<Rat>(need, -ip / (dot(f, rays[i]) * dot(f, rays[j])));
        }
    Int K = ceil_sqrt(need);
    geo.gram.assign(geo.n, QVec(geo.n, Rat(0)));
    for (int i = 0; i < geo.n; ++i)
        for (int j = 0; j < geo.n; ++j) geo.gram[i][j] = (i == j ? Rat(1) : Rat(0)) + Rat(K * K) * f[i] * f[j];
    geo.lip2 = 0;
    for (const auto& r : rays) {
        Rat gr = dot(geo.g, r);
        geo.lip2 = std::max<Rat>(geo.lip2, qform(geo.gram, r, r) / (gr * gr));
    }
    return geo;
}

Rat SepGeometry::q_norm2(const ExpVec& u) const {
    QVec v = u.to_qvec();
    return qform(gram, v, v);
}

Rat SepGeometry::phi_n(const ExpVec& u) const {
    if (u.is_zero()) throw PreconditionError("phi_n of the zero monomial");
    QVec v = u.to_qvec();
    return g0 * v.back() / dot(g, v);
}

bool SepGeometry::b_prime(const ExpVec& u, const Rat& eps, const Rat& l) const {
    if (u.is_zero()) return false;
    if (q_norm2(u) < l * l) return false;
    return phi_n(u) >= eps;
}

bool SepGeometry::b_prime(const RingElem& x, const Rat& eps, const Rat& l) const {
    for (const auto& t : x.terms())
        if (!b_prime(t.first, eps, l)) return false;
    return true;
}

Rat l_bound(const Rat& eps1, [[maybe_unused]] const Rat& eps2, const Rat& eps, const SepGeometry& geo) {
    if (eps1 < 0 || eps <= 0) throw PreconditionError("l_bound needs eps1 >= 0 and eps > 0");
    // g(x) >= sqrt(Q(x)/lip2) on the cone, and a multiplier with n >= -2 eps1 moves
    // phi_n by at most 2 eps1 g0 / g(x)
    Rat l2 = 4 * eps1 * eps1 * geo.g0 * geo.g0 * geo.lip2 / (eps * eps);
    return Rat(ceil_sqrt(l2));
}

ClassSplit split_classes(const RingMatrix& X, const Rat& eps1, const Rat& eps, const Rat& l, const SepGeometry& geo) {
    int r = X.size();
    ClassSplit s{RingMatrix(r, X.dim(), X.base(), X.field()), RingMatrix(r, X.dim(), X.base(), X.field()),
                 RingMatrix(r, X.dim(), X.base(), X.field())};
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            RingElem e = X.at(i, j);
            if (i == j) e -= RingElem::constant(X.dim(), X.base(), 1, X.field());
            std::vector<RingElem::Term> ta, tb, td;
            for (const auto& t : e.terms()) {
                const ExpVec& u = t.first;
                if (u.is_zero()) throw Error("class split: constant term at " + pair_str(i + 1, j + 1));
                Rat un = nth_coord(u);
                if (i != j && un >= eps1)
                    ta.push_back(t);
                else if (i == j && un >= 0)
                    td.push_back(t);
                else if (geo.b_prime(u, -eps, l))
                    tb.push_back(t);
                else
                    throw Error("class split: term " + u.str() + " at " + pair_str(i + 1, j + 1) + " fits no class");
            }
            s.A.at(i, j) = RingElem::from_terms(X.dim(), X.base(), X.field(), ta);
            s.B.at(i, j) = RingElem::from_terms(X.dim(), X.base(), X.field(), tb);
            s.D.at(i, j) = RingElem::from_terms(X.dim(), X.base(), X.field(), td);
        }
    return s;
}

// ---------------------------------------------------------------------------
// commuting rules

Com1Result com1(int i, int j, const RingElem& alpha, const RingElem& beta, const RingMatrix& D, const Rat& eps1,
                const Rat& eps, const Rat& l, const SepGeometry& geo, int max_iter) {
    int r = D.size();
    check_indices(i, j, r);
    if (!is_term(alpha)) throw PreconditionError("com1: alpha must be a nonzero term");
    if (eps1 <= 0 || eps <= 0 || l <= 0) throw PreconditionError("com1: eps1, eps and l must be positive");
    Rat an = nth_coord(alpha.terms()[0].first);
    if (abs(an) >= eps1) throw PreconditionError("com1: need |alpha_n| < eps1");
    for (const auto& t : beta.terms())
        if (nth_coord(t.first) < eps1) throw PreconditionError("com1: beta has a term with n < eps1");
    if (!class_check(D, {MatClass::D, Rat(0), Rat(1), std::nullopt})) throw PreconditionError("com1: D is not in the diagonal class");

    RingMatrix S = elementary(r, j, i, beta) + D;
    RingMatrix X = S;
    left_mul_elementary(X, i, j, -alpha);
    right_mul_elementary(X, i, j, alpha);

    Com1Result out;
    out.gamma = RingElem(alpha.dim(), alpha.base(), alpha.field());
    std::optional<Rat> prev_min;
    for (;;) {
        std::vector<RingElem::Term> g;
        for (const auto& t : X.at(i - 1, j - 1).terms()) {
            Rat un = nth_coord(t.first);
            if (un >= eps1 || geo.b_prime(t.first, -eps, l)) continue;
            if (un < an) throw Error("com1: term below alpha_n in the ij entry");
            g.push_back(t);
        }
        if (g.empty()) break;
        if (++out.iterations > max_iter)
            throw BudgetExceeded("com1: iteration cap reached; the lengths of the gamma terms are not growing (acuteness)");
        Rat mn = geo.q_norm2(g[0].first);
        for (const auto& t : g) mn = std::min<Rat>(mn, geo.q_norm2(t.first));
        if (prev_min && mn <= *prev_min) throw Error("com1: minimal length of gamma terms did not increase");
        prev_min = mn;
        RingElem gk = RingElem::from_terms(alpha.dim(), alpha.base(), alpha.field(), g);
        left_mul_elementary(X, i, j, -gk);
        out.gamma += gk;
    }
    auto sp = split_classes(X, eps1, eps, l, geo);
    out.A = sp.A;
    out.B = sp.B;
    out.D = sp.D;

    RingMatrix lhs = S;
    right_mul_elementary(lhs, i, j, alpha);
    RingMatrix rhs = X;
    left_mul_elementary(rhs, i, j, out.gamma);
    left_mul_elementary(rhs, i, j, alpha);
    if (lhs != rhs || ident_like(X) + out.A + out.B + out.D != X) throw VerificationError("com1: identity check failed");
    return out;
}

Com2Result com2_matrix(const RingMatrix& X0, const Rat& eps1, const Rat& eps, const Rat& l, const SepGeometry& geo,
                       int max_rounds) {
    if (eps1 <= 0 || eps <= 0 || l <= 0) throw PreconditionError("com2: eps1, eps and l must be positive");
    int r = X0.size();
    // every term of X0 - 1 has n >= 0 or lies in B'(-eps, l)
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            RingElem e = X0.at(i, j);
            if (i == j) e -= RingElem::constant(X0.dim(), X0.base(), 1, X0.field());
            for (const auto& t : e.terms()) {
                if (t.first.is_zero()) throw PreconditionError("com2: constant term off the identity");
                if (nth_coord(t.first) < 0 && !geo.b_prime(t.first, -eps, l))
                    throw PreconditionError("com2: term " + t.first.str() + " is neither in A(0) nor in B'(-eps,l)");
            }
        }
    Com2Result out;
    RingMatrix X = X0;
    Rat l2 = l * l;
    for (;;) {
        bool found = false;
        for (int i = 1; i <= r; ++i)
            for (int j = 1; j <= r; ++j) {
                if (i == j) continue;
                std::vector<RingElem::Term> low;
                for (const auto& t : X.at(i - 1, j - 1).terms())
                    if (nth_coord(t.first) < eps1 && geo.q_norm2(t.first) < l2) {
                        if (nth_coord(t.first) < 0) throw Error("com2: short term with negative n-coordinate");
                        low.push_back(t);
                    }
                if (low.empty()) continue;
                RingElem a = RingElem::from_terms(X.dim(), X.base(), X.field(), low);
                left_mul_elementary(X, i, j, -a);
                out.E.insert(out.E.begin(), ElemFactor{i, j, -a});
                found = true;
            }
        if (!found) break;
        if (++out.rounds > max_rounds)
            throw BudgetExceeded("com2: round cap reached; short low terms are not disappearing (acuteness)");
    }
    auto sp = split_classes(X, eps1, eps, l, geo);
    out.A = sp.A;
    out.B = sp.B;
    out.D = sp.D;
    if (word_eval(out.E, r, X.dim(), X.base(), X.field()) * X0 != X || ident_like(X) + out.A + out.B + out.D != X)
        throw VerificationError("com2: identity check failed");
    return out;
}

Com2Result com2(const RingMatrix& A, const RingMatrix& B, const Rat& eps1, const Rat& eps, const Rat& l,
                const SepGeometry& geo, int max_rounds) {
    if (!class_check(A, {MatClass::A, Rat(0), Rat(1), std::nullopt})) throw PreconditionError("com2: A is not in A(0)");
    for (int i = 0; i < B.size(); ++i)
        for (int j = 0; j < B.size(); ++j)
            if (!geo.b_prime(B.at(i, j), -eps, l)) throw PreconditionError("com2: B is not in B(-eps,l)");
    return com2_matrix(ident_like(A) + A + B, eps1, eps, l, geo, max_rounds);
}

Com3Result com3_matrix(int i, int j, const RingElem& alpha, const RingMatrix& S, const Rat& eps1, const Rat& eps2,
                       const Rat& eps, const Rat& l, const SepGeometry& geo, int max_iter) {
    int r = S.size();
    check_indices(i, j, r);
    if (!is_term(alpha)) throw PreconditionError("com3: alpha must be a nonzero term");
    Rat an = nth_coord(alpha.terms()[0].first);
    if (abs(an) >= eps1) throw PreconditionError("com3: need |alpha_n| < eps1");
    if (l <= 0 || l < l_bound(std::max<Rat>(-an, 0), eps2, eps, geo)) throw PreconditionError("com3: l is below l_bound");

    int n = S.dim(), c = S.base();
    const Field& f = S.field();
    RingElem beta(n, c, f);
    RingMatrix D(r, n, c, f);
    for (int p = 0; p < r; ++p)
        for (int q = 0; q < r; ++q) {
            RingElem e = S.at(p, q);
            if (p == q) e -= RingElem::constant(n, c, 1, f);
            std::vector<RingElem::Term> keep;
            for (const auto& t : e.terms()) {
                if (t.first.is_zero()) throw PreconditionError("com3: constant term off the identity");
                Rat un = nth_coord(t.first);
                bool in_a = p != q && un >= eps1, in_d = p == q && un >= 0;
                if (!in_a && !in_d && !geo.b_prime(t.first, -eps2, l))
                    throw PreconditionError("com3: term " + t.first.str() + " is in none of A(eps1), B(-eps2,l), D");
                if ((p == j - 1 && q == i - 1 && in_a) || in_d) keep.push_back(t);
            }
            RingElem k = RingElem::from_terms(n, c, f, keep);
            if (p == q)
                D.at(p, q) = k;
            else if (p == j - 1 && q == i - 1)
                beta = k;
        }

    Com1Result c1 = com1(i, j, alpha, beta, D, eps1, eps2, l, geo, max_iter);
    RingMatrix X = S;
    left_mul_elementary(X, i, j, -alpha - c1.gamma);
    right_mul_elementary(X, i, j, alpha);
    Com2Result c2 = com2_matrix(X, eps1, eps2 + eps, l, geo, max_iter);

    Com3Result out;
    if (!c1.gamma.is_zero()) out.E.push_back({i, j, c1.gamma});
    auto inv = word_inverse(c2.E);
    out.E.insert(out.E.end(), inv.begin(), inv.end());
    out.A = c2.A;
    out.B = c2.B;
    out.D = c2.D;

    RingMatrix lhs = S;
    right_mul_elementary(lhs, i, j, alpha);
    RingMatrix rhs = elementary(r, i, j, alpha) * word_eval(out.E, r, n, c, f) * (ident_like(S) + out.A + out.B + out.D);
    if (lhs != rhs) throw VerificationError("com3: identity check failed");
    return out;
}

Com3Result com3(int i, int j, const RingElem& alpha, const RingMatrix& A, const RingMatrix& B, const RingMatrix& D,
                const Rat& eps1, const Rat& eps2, const Rat& eps, const Rat& l, const SepGeometry& geo, int max_iter) {
    if (!class_check(A, {MatClass::A, eps1, Rat(1), std::nullopt})) throw PreconditionError("com3: A is not in A(eps1)");
    if (!class_check(D, {MatClass::D, Rat(0), Rat(1), std::nullopt})) throw PreconditionError("com3: D is not in the diagonal class");
    for (int p = 0; p < B.size(); ++p)
        for (int q = 0; q < B.size(); ++q)
            if (!geo.b_prime(B.at(p, q), -eps2, l)) throw PreconditionError("com3: B is not in B(-eps2,l)");
    return com3_matrix(i, j, alpha, ident_like(A) + A + B + D, eps1, eps2, eps, l, geo, max_iter);
}

bool generated_by(const std::set<ExpVec>& S0, const ExpVec& u, long budget) {
    if (u.is_zero()) return true;
    std::vector<ExpVec> S;
    for (const auto& s : S0)
        if (!s.is_zero()) S.push_back(s);
    if (S.empty()) return false;
    // a functional positive on S: some positive combination of the elements works
    // for vectors in a pointed cone; fall back to the sum of all of them
    int n = u.dim();
    QVec deg(n, Rat(0));
    for (const auto& s : S) deg = add(deg, s.to_qvec());
    for (const auto& s : S)
        if (dot(deg, s.to_qvec()) <= 0) throw PreconditionError("generated_by: generators do not lie in a pointed cone");
    std::unordered_set<ExpVec, ExpVecHash> failed;
    long steps = 0;
    std::function<bool(const ExpVec&)> rec = [&](const ExpVec& v) -> bool {
        if (v.is_zero()) return true;
        if (dot(deg, v.to_qvec()) <= 0) return false;
        if (failed.count(v)) return false;
        if (++steps > budget) throw BudgetExceeded("generated_by: search budget exhausted");
        for (const auto& s : S)
            if (rec(v - s)) return true;
        failed.insert(v);
        return false;
    };
    return rec(u);
}

ElemWord split_terms(const ElemWord& w) {
    ElemWord out;
    for (const auto& x : w)
        for (const auto& t : x.lambda.terms())
            out.push_back({x.p, x.q, RingElem::monomial(t.first, t.second, x.lambda.field())});
    return out;
}

// ---------------------------------------------------------------------------
// the problem and its coordinates

SeparationProblem::SeparationProblem(const AffineMonoid& M, const Hyperplane& H, const Hyperplane& G, const Rat& eps,
                                     int r, Field f)
    : M_(M), H_(H), G_(G), eps_(eps), r_(r), f_(f) {
    int n = M.ambient_dim(), c = M.base();
    if (r < 2) throw PreconditionError("separation needs r >= 2");
    if (eps <= 0) throw PreconditionError("separation needs eps > 0");
    if (M.rank() != n) throw PreconditionError("separation needs a monoid of full rank");
    if (n < 2) throw PreconditionError("separation needs rank >= 2");
    if (!is_normal(M)) throw PreconditionError("separation needs a normal monoid");
    if (static_cast<int>(H.a.size()) != n || H.level != 0) throw PreconditionError("the cut must be a linear hyperplane");
    if (static_cast<int>(G.a.size()) != n) throw PreconditionError("cross-section dimension mismatch");
    bool pos = false, neg = false;
    for (const auto& ray : M.cone().rays()) {
        Rat v = dot(H.a, ray);
        if (v > 0) pos = true;
        if (v < 0) neg = true;
    }
    if (!pos || !neg) throw PreconditionError("the cut does not dissect the cone");

    // gp coordinates y with x = y B
    const ZMat& B = M.group_basis();
    QMat Bq;
    for (const auto& row : B) Bq.push_back(to_qvec(row));
    // h on the gp basis, primitive and positively oriented
    QVec hq(n);
    for (int i = 0; i < n; ++i) hq[i] = dot(H.a, Bq[i]);
    hq = primitive(hq);
    ZVec v(n);
    for (int i = 0; i < n; ++i) v[i] = hq[i].get_num();
    // column operations P with v P = e_n
    ZMat P(n, ZVec(n, Int(0)));
    for (int i = 0; i < n; ++i) P[i][i] = 1;
    auto col_op = [&](int dst, int src, const Int& q) {  // column dst -= q column src
        v[dst] -= q * v[src];
        for (int k = 0; k < n; ++k) P[k][dst] -= q * P[k][src];
    };
    for (;;) {
        int p = -1;
        for (int i = 0; i < n; ++i)
            if (v[i] != 0 && (p < 0 || abs(v[i]) < abs(v[p]))) p = i;
        bool done = true;
        for (int i = 0; i < n; ++i) {
            if (i == p || v[i] == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), v[i].get_mpz_t(), v[p].get_mpz_t());
            col_op(i, p, q);
            if (v[i] != 0) done = false;
        }
        if (done) {
            if (v[p] < 0) {
                v[p] = -v[p];
                for (int k = 0; k < n; ++k) P[k][p] = -P[k][p];
            }
            if (p != n - 1) {
                std::swap(v[p], v[n - 1]);
                for (int k = 0; k < n; ++k) std::swap(P[k][p], P[k][n - 1]);
            }
            break;
        }
    }
    QMat Pq;
    for (const auto& row : P) Pq.push_back(to_qvec(row));
    // z = y U with U = P^{-T}; T = B^{-1} U, Tinv = P^T B
    QMat U = transpose(*inverse(Pq));
    T_ = matmul(*inverse(Bq), U);
    Tinv_ = matmul(transpose(Pq), Bq);

    std::vector<ExpVec> gens;
    for (const auto& g : M.generators()) gens.push_back(to_internal(g));
    Mi_ = AffineMonoid::from_generators(gens);

    Hyperplane Gi;
    Gi.a.assign(n, Rat(0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) Gi.a[i] += Tinv_[i][k] * G.a[k];
    Gi.level = G.level;
    geo_ = SepGeometry::make(Mi_.cone(), Gi);

    nb1_ = std::make_shared<EpsNeighborhood>(intersect_halfspace(M.cone(), scale(H.a, Rat(-1))), G);
    nb2_ = std::make_shared<EpsNeighborhood>(intersect_halfspace(M.cone(), H.a), G);

    // largest eps/2^k keeping every point with phi_n >= -delta inside C2(eps)
    Rat delta = eps;
    for (int k = 0;; ++k) {
        if (k > 200) throw Error("separation: no internal slack found");
        QVec h = scale(geo_.g, delta);
        h[n - 1] += geo_.g0;
        Cone W = intersect_halfspace(Mi_.cone(), h);
        bool ok = true;
        for (const auto& ray : W.rays())
            if (!nb2_->contains(to_original(ray), eps)) {
                ok = false;
                break;
            }
        if (ok) break;
        delta /= 2;
    }
    eps_int_ = delta;
    (void)c;
}

ExpVec SeparationProblem::to_internal(const ExpVec& x) const {
    QVec q = x.to_qvec(), z(q.size(), Rat(0));
    for (size_t k = 0; k < q.size(); ++k)
        if (q[k] != 0)
            for (size_t i = 0; i < z.size(); ++i) z[i] += q[k] * T_[k][i];
    return ExpVec::from_qvec(z, x.base());
}

QVec SeparationProblem::to_original(const QVec& z) const {
    QVec x(z.size(), Rat(0));
    for (size_t k = 0; k < z.size(); ++k)
        if (z[k] != 0)
            for (size_t i = 0; i < x.size(); ++i) x[i] += z[k] * Tinv_[k][i];
    return x;
}

ExpVec SeparationProblem::to_original(const ExpVec& z) const {
    return ExpVec::from_qvec(to_original(z.to_qvec()), z.base());
}

RingElem SeparationProblem::to_internal(const RingElem& g) const {
    std::vector<RingElem::Term> t;
    for (const auto& [u, a] : g.terms()) t.push_back({to_internal(u), a});
    return RingElem::from_terms(g.dim(), g.base(), g.field(), t);
}

RingElem SeparationProblem::to_original(const RingElem& g) const {
    std::vector<RingElem::Term> t;
    for (const auto& [u, a] : g.terms()) t.push_back({to_original(u), a});
    return RingElem::from_terms(g.dim(), g.base(), g.field(), t);
}

ElemWord SeparationProblem::to_internal(const ElemWord& w) const {
    ElemWord out;
    for (const auto& x : w) out.push_back({x.p, x.q, to_internal(x.lambda)});
    return out;
}

ElemWord SeparationProblem::to_original(const ElemWord& w) const {
    ElemWord out;
    for (const auto& x : w) out.push_back({x.p, x.q, to_original(x.lambda)});
    return out;
}

RingMatrix SeparationProblem::to_original(const RingMatrix& A) const {
    RingMatrix B(A.size(), A.dim(), A.base(), A.field());
    for (int i = 0; i < A.size(); ++i)
        for (int j = 0; j < A.size(); ++j) B.at(i, j) = to_original(A.at(i, j));
    return B;
}

bool SeparationProblem::side_contains(int side, const ExpVec& x, Rat* dist2) const {
    if (x.is_zero()) {
        if (dist2) *dist2 = 0;
        return true;
    }
    if (!M_.hull_interior_contains(x)) return false;
    Rat d = side_sq_distance(side, x.to_qvec());
    if (dist2) *dist2 = d;
    return d < eps_ * eps_;
}

Rat SeparationProblem::side_sq_distance(int side, const QVec& x) const {
    auto p = phi_image(x, G_);
    if (!p) throw PreconditionError("point has no cross-section image");
    return (side == 1 ? nb1_ : nb2_)->sq_distance_to(*p);
}

// ---------------------------------------------------------------------------
// admissible representations

bool length_condition(const ExpVec& z, const SeparationProblem& P) {
    Rat zn = nth_coord(z);
    if (zn <= 0) return true;
    QVec zq = z.to_qvec();
    std::vector<QVec> verts;
    if (zn == 1) {
        verts.push_back(zq);
    } else {
        Rat need = 1 - zn;
        for (const auto& ray : P.internal_monoid().cone().rays()) {
            Rat rn = ray.back();
            if (rn == 0 || (rn > 0) != (need > 0)) continue;
            verts.push_back(add(zq, scale(ray, need / rn)));
        }
    }
    for (const auto& v : verts) {
        QVec x = P.to_original(v);
        if (!P.monoid().cone().interior_contains(x)) return false;
        if (P.side_sq_distance(1, x) >= P.eps() * P.eps()) return false;
    }
    return true;
}

namespace {

// e_ij(a * (sum of parts)) as commutators of factors whose monomials are single parts
void expand_commutators(int i, int j, const Rat& a, const std::vector<ExpVec>& parts, int r, const Field& f,
                        ElemWord& out) {
    if (parts.size() == 1) {
        out.push_back({i, j, RingElem::monomial(parts[0], a, f)});
        return;
    }
    int k = 1;
    while (k == i || k == j) ++k;
    if (k > r) throw PreconditionError("goodrep_normalize: the commutator expansion needs r >= 3");
    size_t h = parts.size() / 2;
    std::vector<ExpVec> p1(parts.begin(), parts.begin() + static_cast<long>(h));
    std::vector<ExpVec> p2(parts.begin() + static_cast<long>(h), parts.end());
    expand_commutators(i, k, a, p1, r, f, out);
    expand_commutators(k, j, Rat(1), p2, r, f, out);
    expand_commutators(i, k, -a, p1, r, f, out);
    expand_commutators(k, j, Rat(-1), p2, r, f, out);
}

Rat factor_n(const ElemFactor& x) {
    return nth_coord(x.lambda.terms()[0].first);
}

}  // namespace

GoodRep goodrep_normalize(const ElemWord& w, const SeparationProblem& P, const SeparationConfig& cfg) {
    int r = P.size();
    check_word(w, r);
    const AffineMonoid& Mi = P.internal_monoid();
    ElemWord terms = split_terms(w);
    int j0 = 0;
    for (const auto& x : terms) {
        const ExpVec& u = x.lambda.terms()[0].first;
        if (!Mi.hull_interior_contains(u))
            throw PreconditionError("goodrep_normalize: " + u.str() + " is not in the interior divisible hull");
        j0 = std::max(j0, u.denom_pow());
    }
    int jmax = cfg.allow_roots ? std::max(j0, cfg.max_frobenius) : j0;
    int j = -1;
    for (int t = j0; t <= jmax && j < 0; ++t) {
        bool ok = true;
        for (const auto& x : terms) {
            ExpVec u = frobenius_exp(x.lambda.terms()[0].first, t);
            if (nth_coord(u) > 0 && !length_condition(u, P)) {
                ok = false;
                break;
            }
        }
        if (ok) j = t;
    }
    if (j < 0)
        throw BudgetExceeded("goodrep_normalize: the length condition fails at every Frobenius level up to " +
                             std::to_string(jmax));

    GoodRep out;
    out.j = j;
    QVec en(Mi.ambient_dim(), Rat(0));
    en.back() = 1;
    for (const auto& x : word_frobenius(terms, j)) {
        const auto& [u, a] = x.lambda.terms()[0];
        Rat un = nth_coord(u);
        if (un.get_den() != 1) throw Error("goodrep_normalize: non-integral n-coordinate after Frobenius");
        if (un >= -1) {
            out.word.push_back(x);
            continue;
        }
        if (r < 3) throw PreconditionError("goodrep_normalize: a factor with n-coordinate below -1 needs r >= 3");
        auto dd = degree_decomposition(Mi, en, u, cfg.allow_roots ? cfg.decomposition_depth : 0);
        expand_commutators(x.p, x.q, a, dd.parts, r, P.field(), out.word);
    }
    int n = Mi.ambient_dim(), c = Mi.base();
    if (word_eval(out.word, r, n, c, P.field()) != mat_frobenius(word_eval(w, r, n, c, P.field()), j))
        throw VerificationError("goodrep_normalize: product changed");
    return out;
}

SeparationCertificate almost_separate(const SeparationProblem& P, const ElemWord& w, const SeparationConfig& cfg) {
    int r = P.size();
    check_word(w, r);
    const AffineMonoid& M = P.monoid();
    int n = M.ambient_dim(), c = M.base();
    const Field& f = P.field();
    for (const auto& x : w)
        for (const auto& t : x.lambda.terms())
            if (!M.hull_interior_contains(t.first))
                throw PreconditionError("almost_separate: " + t.first.str() + " is not in the interior divisible hull");

    SeparationCertificate cert;
    auto record = [&](int side, const ExpVec& u) {
        cert.j_A = std::max(cert.j_A, u.denom_pow());
        Rat d2;
        if (!P.side_contains(side, u, &d2))
            throw VerificationError("almost_separate: support monomial " + u.str() + " is outside side " +
                                    std::to_string(side));
        cert.witnesses.push_back({u, side, d2});
    };
    auto finish = [&]() {
        std::set<ExpVec> s1;
        for (const auto& x : cert.A1)
            for (const auto& t : x.lambda.terms()) s1.insert(t.first);
        for (const auto& u : s1) record(1, u);
        for (const auto& u : mat_support(cert.A2)) record(2, u);
        auto chk = verify_separation(P, w, cert);
        if (!chk.ok) throw VerificationError("almost_separate: certificate check failed: " + chk.failure);
        return cert;
    };

    // a word that is already a C1 block followed by a C2 block needs no rewriting
    {
        auto on_side = [&](const ElemFactor& x, int side) {
            for (const auto& t : x.lambda.terms())
                if (!P.side_contains(side, t.first)) return false;
            return true;
        };
        size_t k = 0;
        while (k < w.size() && on_side(w[k], 1)) ++k;
        size_t k2 = k;
        while (k2 < w.size() && on_side(w[k2], 2)) ++k2;
        if (k2 == w.size()) {
            cert.A1.assign(w.begin(), w.begin() + static_cast<long>(k));
            cert.A2 = word_eval(ElemWord(w.begin() + static_cast<long>(k), w.end()), r, n, c, f);
            return finish();
        }
    }

    GoodRep gr = goodrep_normalize(P.to_internal(w), P, cfg);
    RingMatrix target = word_eval(gr.word, r, n, c, f);
    ElemWord W = gr.word;
    RingMatrix Z = RingMatrix::identity(r, n, c, f);
    const SepGeometry& geo = P.geometry();
    const Rat delta = P.eps_internal();

    cert.frobenius = gr.j;
    // exact shortcuts: merge equal neighbours, move side-2 factors that commute
    // with everything after them into Z, stop once every factor is on side 1
    auto on_side = [&](const ElemFactor& x, int side) {
        return P.side_contains(side, P.to_original(frobenius_exp(x.lambda.terms()[0].first, -gr.j)));
    };
    auto commute = [](const ElemFactor& x, const ElemFactor& y) { return x.q != y.p && x.p != y.q; };
    auto simplify = [&]() {
        ElemWord merged;
        for (const auto& x : W) {
            if (!merged.empty() && merged.back().p == x.p && merged.back().q == x.q &&
                merged.back().lambda.terms()[0].first == x.lambda.terms()[0].first) {
                merged.back().lambda += x.lambda;
                if (merged.back().lambda.is_zero()) merged.pop_back();
            } else {
                merged.push_back(x);
            }
        }
        W = std::move(merged);
        ElemWord tail;
        for (size_t k = W.size(); k-- > 0;) {
            if (!on_side(W[k], 2)) continue;
            bool ok = true;
            for (size_t t = k + 1; t < W.size() && ok; ++t) ok = commute(W[k], W[t]);
            if (!ok) continue;
            tail.insert(tail.begin(), W[k]);
            W.erase(W.begin() + static_cast<long>(k));
        }
        if (!tail.empty()) Z = word_eval(tail, r, n, c, f) * Z;
        for (const auto& x : W)
            if (!on_side(x, 1)) return false;
        return true;
    };

    std::optional<std::pair<Rat, long>> prev;
    for (;;) {
        if (simplify()) break;
        if (W.empty()) break;
        Rat a = factor_n(W[0]);
        for (const auto& x : W) a = std::max<Rat>(a, factor_n(x));
        if (a <= 1) break;
        long p = 0;
        size_t kp = 0;
        for (size_t k = 0; k < W.size(); ++k)
            if (factor_n(W[k]) == a) {
                ++p;
                kp = k;
            }
        if (prev && !(a < prev->first || (a == prev->first && p < prev->second)))
            throw Error("almost_separate: the bounding pair did not decrease");
        prev = {a, p};
        if (cfg.log)
            cfg.log("bounding pair (" + to_string(a) + "," + std::to_string(p) + "), word length " +
                    std::to_string(W.size()) + ", Z terms " + std::to_string(mat_support(Z).size()));
        if (++cert.iterations > cfg.main_iterations) throw BudgetExceeded("almost_separate: main loop iteration cap");

        if (kp + 1 == W.size()) {
            Z = elementary(r, W.back().p, W.back().q, W.back().lambda) * Z;
            W.pop_back();
        } else {
            size_t m = W.size() - 1 - kp;
            Rat eps2 = delta / 2, epsp = delta / (2 * Rat(static_cast<long>(m)));
            Rat l = std::max<Rat>(l_bound(Rat(1), eps2, epsp, geo), Rat(1));
            RingMatrix S = elementary(r, W[kp].p, W[kp].q, W[kp].lambda);
            ElemWord calE;
            for (size_t t = 1; t <= m; ++t) {
                const ElemFactor& x = W[kp + t];
                Rat e2t = eps2 + Rat(static_cast<long>(t - 1)) * epsp;
                if (cfg.log)
                    cfg.log("  com3 step " + std::to_string(t) + "/" + std::to_string(m) + " alpha " + x.lambda.str() +
                            " l " + to_string(l) + " S terms " + std::to_string(mat_support(S).size()));
                Com3Result res = com3_matrix(x.p, x.q, x.lambda, S, a, e2t, epsp, l, geo, cfg.com_iterations);
                ++cert.com3_calls;
                calE.push_back(x);
                for (const auto& y : split_terms(res.E)) calE.push_back(y);
                S = RingMatrix::identity(r, n, c, f) + res.A + res.B + res.D;
            }
            Z = S * Z;
            W.resize(kp);
            W.insert(W.end(), calE.begin(), calE.end());
        }
        if (static_cast<long>(W.size()) > cfg.max_word_length)
            throw BudgetExceeded("almost_separate: word length cap reached");
        if (word_eval(W, r, n, c, f) * Z != target) throw VerificationError("almost_separate: intermediate identity failed");
    }

    cert.A1 = P.to_original(word_frobenius(W, -gr.j));
    cert.A2 = P.to_original(mat_frobenius(Z, -gr.j));
    return finish();
}

CheckResult verify_separation(const SeparationProblem& P, const ElemWord& input, const SeparationCertificate& cert) {
    int r = P.size();
    const AffineMonoid& M = P.monoid();
    int n = M.ambient_dim(), c = M.base();
    const Field& f = P.field();
    auto fail = [](std::string s) { return CheckResult{false, std::move(s)}; };
    try {
        check_word(cert.A1, r);
        check_word(input, r);
    } catch (const PreconditionError& e) {
        return fail(std::string("word indices: ") + e.what());
    }
    if (cert.A2.size() != r || cert.A2.dim() != n || cert.A2.base() != c || cert.A2.field() != f)
        return fail("A2 shape");
    if (cert.j_A < 0) return fail("j_A >= 0");
    if (word_eval(cert.A1, r, n, c, f) * cert.A2 != word_eval(input, r, n, c, f))
        return fail("product identity word_eval(A1) * A2 = input");
    if (!is_SL(cert.A2)) return fail("det(A2) = 1");
    std::set<ExpVec> s1, s2;
    for (const auto& x : cert.A1)
        for (const auto& t : x.lambda.terms()) s1.insert(t.first);
    s2 = mat_support(cert.A2);
    std::map<std::pair<int, ExpVec>, Rat> wit;
    for (const auto& wv : cert.witnesses) wit[{wv.side, wv.u}] = wv.dist2;
    for (int side : {1, 2})
        for (const auto& u : side == 1 ? s1 : s2) {
            std::string name = side == 1 ? "A1" : "A2";
            if (u.denom_pow() > cert.j_A) return fail(name + " support " + u.str() + " needs a level above j_A");
            Rat d2;
            if (!P.side_contains(side, u, &d2))
                return fail(name + " support " + u.str() + " outside (M" + std::to_string(side) + "(eps)_*)^{c^-j_A}");
            auto it = wit.find({side, u});
            if (it == wit.end() || it->second != d2) return fail(name + " support witness for " + u.str());
        }
    return {};
}

}  // namespace mf
