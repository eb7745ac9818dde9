#include "mf/monoids.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mf {

namespace {

QMat to_qmat(const std::vector<ExpVec>& v) {
    QMat m;
    for (const auto& u : v) m.push_back(u.to_qvec());
    return m;
}

ZVec to_zvec(const QVec& v) {
    ZVec z;
    for (const auto& x : v) {
        if (x.get_den() != 1) throw Error("expected an integral vector");
        z.push_back(x.get_num());
    }
    return z;
}

ExpVec integral_expvec(const QVec& v, int c) {
    return ExpVec::from_qvec(v, c);
}

// c-adic valuation of the denominator of q (q must be c-adic)
int denom_level(const Rat& q, int c) {
    Int d = q.get_den();
    int j = 0;
    while (d != 1) {
        if (d % c != 0) {
            // d divides c^j for some j; multiply through
            Int g;
            mpz_gcd_ui(g.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(c));
            if (g == 1) throw Error("denominator is not a power of c");
            d /= g;
        } else {
            d /= c;
        }
        ++j;
    }
    return j;
}

Rat round_to_grid(const Rat& q, const Int& scale) {
    Rat x = q * Rat(scale) + Rat(1, 2);
    return Rat(floor_rat(x)) / Rat(scale);
}

}  // namespace

AffineMonoid AffineMonoid::trivial(int n, int c) {
    AffineMonoid M;
    M.n_ = n;
    M.c_ = c;
    M.cone_ = Cone(n);
    M.deg_.assign(n, Rat(0));
    return M;
}

AffineMonoid AffineMonoid::from_generators(const std::vector<ExpVec>& gens_in) {
    if (gens_in.empty()) throw PreconditionError("monoid needs at least one generator (use trivial())");
    int n = gens_in[0].dim(), c = gens_in[0].base();
    std::vector<ExpVec> gens;
    for (const auto& g : gens_in) {
        if (g.dim() != n || g.base() != c) throw PreconditionError("monoid generators of mixed dimension/base");
        if (!g.is_integral()) throw PreconditionError("monoid generators must be integral");
        if (!g.is_zero()) gens.push_back(g);
    }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    if (gens.empty()) return trivial(n, c);
    AffineMonoid M;
    M.n_ = n;
    M.c_ = c;
    M.gens_ = gens;
    M.cone_ = Cone::from_generators(to_qmat(gens), n);
    ZMat z;
    for (const auto& g : gens) z.push_back(to_zvec(g.to_qvec()));
    M.gp_ = hnf_basis(z);
    M.deg_.assign(n, Rat(0));
    for (const auto& f : M.cone_.facet_normals()) M.deg_ = add(M.deg_, f);
    if (M.cone_.facet_normals().empty()) throw Error("cone without facets");
    return M;
}

AffineMonoid AffineMonoid::from_qmat(const QMat& gens, int c) {
    std::vector<ExpVec> v;
    for (const auto& g : gens) v.push_back(ExpVec::from_qvec(g, c));
    return from_generators(v);
}

std::vector<ExpVec> AffineMonoid::extreme_generators() const {
    std::vector<ExpVec> out;
    for (const auto& r : cone_.rays()) {
        std::optional<ExpVec> best;
        Rat best_deg;
        for (const auto& g : gens_) {
            QVec q = g.to_qvec();
            if (primitive(q) != r) continue;
            Rat d = dot(deg_, q);
            if (!best || d < best_deg) {
                best = g;
                best_deg = d;
            }
        }
        out.push_back(*best);
    }
    return out;
}

bool AffineMonoid::in_group(const ExpVec& u) const {
    if (!u.is_integral()) return false;
    if (u.is_zero()) return true;
    return lattice_coords(gp_, to_zvec(u.to_qvec())).has_value();
}

bool AffineMonoid::in_localized_group(const ExpVec& u) const {
    if (u.is_zero()) return true;
    QVec q = u.to_qvec();
    if (!cone_.in_span(q)) return false;
    ZVec num;
    for (auto x : u.numerators()) num.push_back(Int(static_cast<long>(x)));
    Int ck = 1;
    for (int k = 0; k <= 64; ++k) {
        ZVec v;
        for (const auto& x : num) v.push_back(x * ck);
        if (lattice_coords(gp_, v)) return true;
        ck *= c_;
    }
    return false;
}

bool AffineMonoid::member_integral(const std::vector<int64_t>& u0) const {
    bool zero = std::all_of(u0.begin(), u0.end(), [](int64_t x) { return x == 0; });
    if (zero) return true;
    QVec q;
    for (auto x : u0) q.push_back(Rat(static_cast<long>(x)));
    if (!cone_.contains(q)) return false;
    ZVec z;
    for (auto x : u0) z.push_back(Int(static_cast<long>(x)));
    if (!lattice_coords(gp_, z)) return false;

    std::vector<std::vector<int64_t>> G;
    for (const auto& g : gens_) G.push_back(g.numerators());
    std::set<std::vector<int64_t>> failed;
    long budget = 20000000;
    std::function<bool(const std::vector<int64_t>&)> rec = [&](const std::vector<int64_t>& u) -> bool {
        if (std::all_of(u.begin(), u.end(), [](int64_t x) { return x == 0; })) return true;
        if (failed.count(u)) return false;
        if (--budget < 0) throw BudgetExceeded("monoid membership search budget exhausted");
        for (const auto& g : G) {
            std::vector<int64_t> w(u.size());
            for (size_t i = 0; i < u.size(); ++i) w[i] = checked_add(u[i], -g[i]);
            QVec wq;
            for (auto x : w) wq.push_back(Rat(static_cast<long>(x)));
            if (!cone_.contains(wq)) continue;
            if (rec(w)) return true;
        }
        failed.insert(u);
        return false;
    };
    return rec(u0);
}

bool AffineMonoid::contains(const ExpVec& u) const {
    if (u.dim() != n_ || u.base() != c_) throw PreconditionError("membership: dimension/base mismatch");
    return member_integral(u.numerators());
}

bool AffineMonoid::interior_contains(const ExpVec& u) const {
    if (u.is_zero()) return true;
    return cone_.interior_contains(u.to_qvec()) && contains(u);
}

bool AffineMonoid::hull_interior_contains(const ExpVec& u) const {
    if (u.dim() != n_ || u.base() != c_) throw PreconditionError("membership: dimension/base mismatch");
    if (u.is_zero()) return true;
    return cone_.interior_contains(u.to_qvec()) && in_localized_group(u);
}

bool AffineMonoid::hull_contains(const ExpVec& u) const {
    if (u.dim() != n_ || u.base() != c_) throw PreconditionError("membership: dimension/base mismatch");
    if (u.is_zero()) return true;
    if (!cone_.contains(u.to_qvec()) || !in_localized_group(u)) return false;
    for (int k = 0; k <= 16; ++k)
        if (contains(frobenius_exp(u, k))) return true;
    throw BudgetExceeded("hull membership: no c-power multiple found in M within 16 steps");
}

std::string AffineMonoid::str() const {
    std::string s = "<";
    for (size_t i = 0; i < gens_.size(); ++i) {
        if (i) s += ",";
        s += gens_[i].str();
    }
    return s + ">";
}

bool membership(const AffineMonoid& M, const ExpVec& u) {
    return M.contains(u);
}

bool interior_membership(const AffineMonoid& M, const ExpVec& u) {
    return M.interior_contains(u);
}

QVec lattice_ray_generator(const QVec& r, const ZMat& L) {
    if (L.empty()) return primitive(r);
    QMat BT(L[0].size(), QVec(L.size()));
    for (size_t i = 0; i < L.size(); ++i)
        for (size_t k = 0; k < L[0].size(); ++k) BT[k][i] = Rat(L[i][k]);
    auto a = solve(BT, r);
    if (!a) throw PreconditionError("ray is outside the lattice span");
    QVec p = primitive(*a);
    for (size_t i = 0; i < a->size(); ++i)
        if ((*a)[i] != 0) return scale(r, p[i] / (*a)[i]);
    throw Error("zero ray");
}

void for_each_lattice_point(const Cone& C, const ZMat& L, const QVec& deg, const Rat& bound, long max_points,
                            const std::function<void(const QVec&)>& f) {
    int n = C.ambient_dim();
    if (C.rays().empty()) return;
    // region {x in C : deg.x <= bound} = conv(0, bound * r / deg(r))
    QVec lo(n, Rat(0)), hi(n, Rat(0));
    for (const auto& r : C.rays()) {
        QVec v = scale(r, bound / dot(deg, r));
        for (int i = 0; i < n; ++i) {
            if (v[i] < lo[i]) lo[i] = v[i];
            if (v[i] > hi[i]) hi[i] = v[i];
        }
    }
    std::vector<Int> a(n), b(n);
    Int total = 1;
    for (int i = 0; i < n; ++i) {
        a[i] = ceil_rat(lo[i]);
        b[i] = floor_rat(hi[i]);
        total *= (b[i] - a[i] + 1);
    }
    if (total > max_points) throw BudgetExceeded("lattice point enumeration exceeds " + std::to_string(max_points) + " candidates");
    std::vector<Int> x = a;
    QVec q(n);
    for (;;) {
        for (int i = 0; i < n; ++i) q[i] = Rat(x[i]);
        if (!is_zero(q) && dot(deg, q) <= bound && C.contains(q)) {
            bool in_l = L.empty() || lattice_coords(L, x).has_value();
            if (in_l) f(q);
        }
        int i = 0;
        while (i < n) {
            if (x[i] < b[i]) {
                ++x[i];
                break;
            }
            x[i] = a[i];
            ++i;
        }
        if (i == n) break;
    }
}

std::vector<ExpVec> hilbert_basis(const Cone& C, int c, const ZMat& L, long max_points) {
    if (C.rays().empty()) return {};
    QVec deg(C.ambient_dim(), Rat(0));
    for (const auto& f : C.facet_normals()) deg = add(deg, f);
    std::vector<Rat> rd;
    for (const auto& r : C.rays()) rd.push_back(dot(deg, lattice_ray_generator(r, L)));
    std::sort(rd.rbegin(), rd.rend());
    Rat bound = 0;
    for (int i = 0; i < C.dim() && i < static_cast<int>(rd.size()); ++i) bound += rd[i];

    std::vector<std::pair<Rat, QVec>> cand;
    for_each_lattice_point(C, L, deg, bound, max_points, [&](const QVec& x) { cand.push_back({dot(deg, x), x}); });
    std::sort(cand.begin(), cand.end());
    std::vector<QVec> basis;
    for (const auto& [d, x] : cand) {
        bool reducible = false;
        for (const auto& h : basis) {
            QVec w = sub(x, h);
            if (!is_zero(w) && C.contains(w)) {
                reducible = true;
                break;
            }
        }
        if (!reducible) basis.push_back(x);
    }
    std::vector<ExpVec> out;
    for (const auto& x : basis) out.push_back(integral_expvec(x, c));
    std::sort(out.begin(), out.end());
    return out;
}

AffineMonoid normalization(const AffineMonoid& M) {
    if (M.rank() == 0) return M;
    return AffineMonoid::from_generators(hilbert_basis(M.cone(), M.base(), M.group_basis()));
}

bool is_normal(const AffineMonoid& M) {
    AffineMonoid N = normalization(M);
    for (const auto& h : N.generators())
        if (!M.contains(h)) return false;
    return true;
}

AffineMonoid face_restrict(const AffineMonoid& M, const Cone& F) {
    if (!M.cone().is_face(F)) throw PreconditionError("face_restrict: not a face of the monoid's cone");
    std::vector<ExpVec> g;
    for (const auto& u : M.generators())
        if (F.contains(u)) g.push_back(u);
    if (g.empty()) return AffineMonoid::trivial(M.ambient_dim(), M.base());
    return AffineMonoid::from_generators(g);
}

AffineMonoid polytope_restrict(const AffineMonoid& M, const Polytope& W) {
    if (!is_normal(M)) throw PreconditionError("polytope_restrict: monoid is not normal");
    for (const auto& v : W.vertices()) {
        if (is_zero(v)) throw PreconditionError("polytope_restrict: polytope contains the origin");
        if (!M.cone().contains(v)) throw PreconditionError("polytope_restrict: polytope leaves the cone");
    }
    Cone CW = Cone::from_generators(W.vertices(), M.ambient_dim());
    auto hb = hilbert_basis(CW, M.base(), M.group_basis());
    if (hb.empty()) return AffineMonoid::trivial(M.ambient_dim(), M.base());
    return AffineMonoid::from_generators(hb);
}

bool seminormal_check(const AffineMonoid& M) {
    for (const auto& F : M.cone().faces()) {
        if (F.dim() == 0) continue;
        AffineMonoid N = face_restrict(M, F);
        std::vector<Rat> degs;
        for (const auto& g : N.extreme_generators()) degs.push_back(dot(N.degree(), g.to_qvec()));
        std::sort(degs.rbegin(), degs.rend());
        Rat bound = 0;
        for (int i = 0; i < N.rank(); ++i) bound += degs[i];
        bound *= 2;
        bool ok = true;
        for_each_lattice_point(N.cone(), N.group_basis(), N.degree(), bound, 4000000, [&](const QVec& x) {
            if (!ok || !N.cone().interior_contains(x)) return;
            if (!N.contains(integral_expvec(x, M.base()))) ok = false;
        });
        if (!ok) return false;
    }
    return true;
}

namespace {

struct GpCoords {
    QMat G;  // rows: gp basis (k x n)
    std::optional<QVec> to(const QVec& x) const {
        QMat BT(G[0].size(), QVec(G.size()));
        for (size_t i = 0; i < G.size(); ++i)
            for (size_t k = 0; k < G[0].size(); ++k) BT[k][i] = G[i][k];
        return solve(BT, x);
    }
    QVec from(const QVec& y) const {
        QVec x(G[0].size(), Rat(0));
        for (size_t i = 0; i < G.size(); ++i) x = add(x, scale(G[i], y[i]));
        return x;
    }
};

}  // namespace

FreeCover free_cover(const AffineMonoid& M, const std::vector<ExpVec>& S_in, int max_depth) {
    if (M.rank() == 0) throw PreconditionError("free_cover: trivial monoid");
    if (!M.is_simplicial()) throw PreconditionError("free_cover: the cone of M is not simplicial");
    int c = M.base();
    int k = M.rank();
    std::vector<ExpVec> S;
    for (const auto& s : S_in) {
        if (s.is_zero()) continue;
        if (!M.hull_interior_contains(s)) throw PreconditionError("free_cover: " + s.str() + " is not an interior element");
        S.push_back(s);
    }
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());

    GpCoords gp;
    for (const auto& row : M.group_basis()) gp.G.push_back(to_qvec(row));
    auto ext = M.extreme_generators();

    FreeCover out;
    auto finish = [&](const std::vector<QVec>& basis_gp) {
        // expansion coefficients of each s, then clear c-power denominators
        QMat B = basis_gp;
        auto Binv = inverse(B);
        if (!Binv) throw Error("free_cover: dependent basis");
        std::vector<QVec> coef;
        int J = 0;
        for (const auto& s : S) {
            QVec y = *gp.to(s.to_qvec());
            QVec a = matvec(transpose(*Binv), y);
            for (const auto& x : a) J = std::max(J, denom_level(x, c));
            coef.push_back(a);
        }
        Rat cj(ipow(c, static_cast<unsigned long>(J)));
        out.basis.clear();
        for (const auto& b : basis_gp) out.basis.push_back(ExpVec::from_qvec(scale(gp.from(b), 1 / cj), c));
        out.coords.clear();
        for (const auto& a : coef) {
            std::vector<Int> z;
            for (const auto& x : a) z.push_back(Int(x * cj));
            out.coords.push_back(z);
        }
    };

    // independent S: extend by interior lattice points
    QMat Sq;
    for (const auto& s : S) Sq.push_back(*gp.to(s.to_qvec()));
    if (rank(Sq) == static_cast<int>(S.size())) {
        std::vector<QVec> basis = Sq;
        QVec w(k, Rat(0));
        for (const auto& e : ext) w = add(w, *gp.to(e.to_qvec()));
        std::vector<QVec> cands{w};
        for (const auto& e : ext) cands.push_back(add(w, *gp.to(e.to_qvec())));
        for (const auto& e : ext) cands.push_back(add(w, scale(*gp.to(e.to_qvec()), Rat(k))));
        for (const auto& v : cands) {
            if (static_cast<int>(basis.size()) == k) break;
            basis.push_back(v);
            if (rank(basis) < static_cast<int>(basis.size())) basis.pop_back();
        }
        if (static_cast<int>(basis.size()) == k) {
            // keep S first so each s is a basis vector
            finish(basis);
            if (verify_free_cover(M, S, out)) return out;
        }
    }

    // general case: approximate a simplicial cone around S by an element of GL_k(Z[1/c])
    std::vector<QVec> rays;
    QVec w(k, Rat(0));
    for (const auto& e : ext) {
        rays.push_back(*gp.to(e.to_qvec()));
        w = add(w, rays.back());
    }
    QMat T;
    Rat eta(1, 2);
    for (int it = 0;; ++it) {
        if (it > 60) throw BudgetExceeded("free_cover: no enclosing cone found");
        T.clear();
        for (const auto& r : rays) T.push_back(add(r, scale(w, eta)));
        auto Tinv = inverse(T);
        bool ok = true;
        for (const auto& y : Sq) {
            QVec a = matvec(transpose(*Tinv), y);
            for (const auto& x : a)
                if (x <= 0) ok = false;
        }
        if (ok) break;
        eta /= 2;
    }
    Rat d = det(T);
    if (k == 1) {
        finish({QVec{d > 0 ? Rat(1) : Rat(-1)}});
        if (verify_free_cover(M, S, out)) return out;
        throw VerificationError("free_cover: rank-one cover failed verification");
    }
    // primitive integer rows, then spread the prime factors of the determinant
    // over the rows so the entries of T in SL_k(Q) stay balanced
    for (auto& row : T) row = primitive(row);
    d = det(T);
    if (d < 0) std::swap(T[0], T[1]);
    {
        Int D = Rat(abs(d)).get_num();
        std::vector<Int> primes;
        for (Int p = 2; p * p <= D; ++p)
            while (D % p == 0) {
                primes.push_back(p);
                D /= p;
            }
        if (D > 1) primes.push_back(D);
        std::sort(primes.rbegin(), primes.rend());
        std::vector<Int> m(k, Int(1));
        for (const auto& p : primes) {
            int best = 0;
            for (int i = 1; i < k; ++i)
                if (m[i] < m[best]) best = i;
            m[best] *= p;
        }
        for (int i = 0; i < k; ++i) T[i] = scale(T[i], Rat(1) / Rat(m[i]));
    }
    auto ops = elementary_factor_sl(T);
    for (int t = 0; t <= max_depth; ++t) {
        Int ct = ipow(c, static_cast<unsigned long>(t));
        std::vector<ElemOp> rounded = ops;
        for (auto& op : rounded) op.q = round_to_grid(op.q, ct);
        QMat B = eval_elem_ops(rounded, k);
        bool ok = true;
        for (const auto& b : B)
            if (!M.cone().interior_contains(gp.from(b))) ok = false;
        if (!ok) continue;
        auto Binv = inverse(B);
        for (const auto& y : Sq) {
            QVec a = matvec(transpose(*Binv), y);
            for (const auto& x : a)
                if (x < 0) ok = false;
        }
        if (!ok) continue;
        finish(B);
        if (verify_free_cover(M, S, out)) return out;
    }
    throw BudgetExceeded("free_cover: denominator depth budget exhausted");
}

bool verify_free_cover(const AffineMonoid& M, const std::vector<ExpVec>& S_in, const FreeCover& L) {
    if (static_cast<int>(L.basis.size()) != M.rank()) return false;
    QMat B;
    for (const auto& b : L.basis) {
        if (b.is_zero() || !M.hull_interior_contains(b)) return false;
        B.push_back(b.to_qvec());
    }
    if (rank(B) != M.rank()) return false;
    std::vector<ExpVec> S;
    for (const auto& s : S_in)
        if (!s.is_zero()) S.push_back(s);
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());
    if (L.coords.size() != S.size()) return false;
    for (size_t i = 0; i < S.size(); ++i) {
        QVec sum(M.ambient_dim(), Rat(0));
        for (size_t j = 0; j < B.size(); ++j) {
            if (L.coords[i][j] < 0) return false;
            sum = add(sum, scale(B[j], Rat(L.coords[i][j])));
        }
        if (sum != S[i].to_qvec()) return false;
    }
    return true;
}

DegreeDecomposition degree_decomposition(const AffineMonoid& M, const QVec& h, const ExpVec& m, int max_depth) {
    if (m.is_zero() || !M.hull_interior_contains(m)) throw PreconditionError("degree_decomposition: m is not interior");
    Rat dr = eval(h, m);
    if (dr == 0 || dr.get_den() != 1) throw PreconditionError("degree_decomposition: h(m) must be a nonzero integer");
    long d = dr.get_num().get_si();
    long ad = std::labs(d);
    int sgn_d = d > 0 ? 1 : -1;
    int c = M.base();
    // h on the gp basis; unimodular column reduction gives y0 with h(y0)=1 and a kernel basis
    const ZMat& G = M.group_basis();
    int k = static_cast<int>(G.size());
    ZVec hv(k);
    for (int i = 0; i < k; ++i) {
        Rat v = dot(h, to_qvec(G[i]));
        if (v.get_den() != 1) throw PreconditionError("degree_decomposition: h is not integral on gp(M)");
        hv[i] = v.get_num();
    }
    ZMat U(k, ZVec(k, Int(0)));
    for (int i = 0; i < k; ++i) U[i][i] = 1;  // columns track combinations
    for (;;) {
        int p = -1;
        for (int i = 0; i < k; ++i)
            if (hv[i] != 0 && (p < 0 || abs(hv[i]) < abs(hv[p]))) p = i;
        if (p < 0) throw PreconditionError("degree_decomposition: h vanishes on gp(M)");
        bool done = true;
        for (int i = 0; i < k; ++i) {
            if (i == p || hv[i] == 0) continue;
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), hv[i].get_mpz_t(), hv[p].get_mpz_t());
            hv[i] -= q * hv[p];
            for (int r = 0; r < k; ++r) U[r][i] -= q * U[r][p];
            if (hv[i] != 0) done = false;
        }
        if (done) {
            if (abs(hv[p]) != 1) throw PreconditionError("degree_decomposition: h is not surjective on gp(M)");
            if (hv[p] < 0) {
                hv[p] = 1;
                for (int r = 0; r < k; ++r) U[r][p] = -U[r][p];
            }
            auto ambient = [&](int col) {
                QVec x(M.ambient_dim(), Rat(0));
                for (int r = 0; r < k; ++r) x = add(x, scale(to_qvec(G[r]), Rat(U[r][col])));
                return x;
            };
            QVec y0 = ambient(p);
            QMat K;
            for (int i = 0; i < k; ++i)
                if (i != p) K.push_back(ambient(i));
            QVec mq = m.to_qvec();
            for (int t = 0; t <= max_depth; ++t) {
                Int ct = ipow(c, static_cast<unsigned long>(t));
                std::vector<QVec> x{QVec(M.ambient_dim(), Rat(0))};
                for (long i = 1; i < ad; ++i) {
                    QVec a = scale(mq, Rat(i, ad));
                    QVec base = scale(y0, Rat(i * sgn_d));
                    QVec rest = sub(a, base);
                    QVec pt = base;
                    if (!K.empty()) {
                        auto kap = solve(transpose(K), rest);
                        if (!kap) throw Error("degree_decomposition: subdivision point leaves the kernel");
                        for (size_t l = 0; l < K.size(); ++l) pt = add(pt, scale(K[l], round_to_grid((*kap)[l], ct)));
                    }
                    x.push_back(pt);
                }
                x.push_back(mq);
                DegreeDecomposition out;
                out.depth = t;
                bool ok = true;
                for (long i = 1; i <= ad && ok; ++i) {
                    QVec part = sub(x[i], x[i - 1]);
                    ExpVec e = ExpVec::from_qvec(part, c);
                    if (e.is_zero() || !M.hull_interior_contains(e)) ok = false;
                    out.parts.push_back(e);
                }
                if (ok) return out;
            }
            throw BudgetExceeded("degree_decomposition: denominator depth budget exhausted");
        }
    }
}

bool is_acute(const std::vector<ExpVec>& rays) {
    for (size_t i = 0; i < rays.size(); ++i)
        for (size_t j = i + 1; j < rays.size(); ++j)
            if (inner(rays[i], rays[j]) < 0) return false;
    return true;
}

ExpVec apply_integer_map(const std::vector<std::vector<int64_t>>& T, const ExpVec& u) {
    std::vector<int64_t> out(T.size(), 0);
    auto num = u.numerators();
    for (size_t i = 0; i < T.size(); ++i)
        for (size_t j = 0; j < num.size(); ++j) out[i] = checked_add(out[i], checked_mul(T[i][j], num[j]));
    return ExpVec(out, u.denom_pow(), u.base());
}

std::optional<ShearResult> acuteness_shear(const AffineMonoid& M, const Hyperplane& H, int64_t max_k) {
    int n = M.ambient_dim();
    bool pos = false, neg = false;
    for (const auto& r : M.cone().rays()) {
        Rat s = dot(H.a, r);
        if (s > 0) pos = true;
        if (s < 0) neg = true;
    }
    if (H.level != 0 || !pos || !neg) throw PreconditionError("acuteness_shear: hyperplane does not dissect the cone");
    auto ext = M.extreme_generators();
    for (int64_t step = 0; step <= 2 * max_k; ++step) {
        int64_t k = (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
        std::vector<std::vector<int64_t>> T(n, std::vector<int64_t>(n, 0));
        for (int i = 0; i < n; ++i) T[i][i] = 1;
        for (int j = 1; j < n; ++j) T[0][j] = k;
        std::vector<ExpVec> sheared;
        for (const auto& e : ext) sheared.push_back(apply_integer_map(T, e));
        if (!is_acute(sheared)) continue;
        std::vector<ExpVec> gens;
        for (const auto& g : M.generators()) gens.push_back(apply_integer_map(T, g));
        ShearResult r;
        r.T = T;
        r.k = k;
        r.sheared = AffineMonoid::from_generators(gens);
        return r;
    }
    return std::nullopt;
}

}  // namespace mf
