#include "mf/polyhedra.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace mf {

namespace {

// Extreme rays of {a in R^k : Y_i . a >= 0 for all i} by incremental double
// description. Requires rank(Y) == k. The result is pointed.
QMat dual_rays(const QMat& Y, int k) {
    auto basis = independent_rows(Y);
    QMat B;
    for (int i : basis) B.push_back(Y[i]);
    auto Binv = inverse(B);
    if (!Binv) throw Error("dual_rays: singular basis");
    size_t m = Y.size();

    struct Ray {
        QVec v;
        std::vector<bool> zero;
    };
    std::vector<Ray> rays;
    std::vector<bool> processed(m, false);
    for (int i : basis) processed[i] = true;
    for (int j = 0; j < k; ++j) {
        Ray r;
        r.v.resize(k);
        for (int i = 0; i < k; ++i) r.v[i] = (*Binv)[i][j];
        r.v = primitive(r.v);
        r.zero.assign(m, false);
        for (int t = 0; t < k; ++t)
            if (t != j) r.zero[basis[t]] = true;
        rays.push_back(std::move(r));
    }

    for (size_t ci = 0; ci < m; ++ci) {
        if (processed[ci]) continue;
        processed[ci] = true;
        std::vector<Rat> s(rays.size());
        std::vector<size_t> pos, neg;
        std::vector<Ray> next;
        for (size_t r = 0; r < rays.size(); ++r) {
            s[r] = dot(Y[ci], rays[r].v);
            if (s[r] > 0) pos.push_back(r);
            if (s[r] < 0) neg.push_back(r);
            if (s[r] >= 0) {
                Ray keep = rays[r];
                if (s[r] == 0) keep.zero[ci] = true;
                next.push_back(std::move(keep));
            }
        }
        for (size_t p : pos)
            for (size_t q : neg) {
                std::vector<bool> common(m, false);
                int cnt = 0;
                for (size_t t = 0; t < m; ++t)
                    if (rays[p].zero[t] && rays[q].zero[t]) {
                        common[t] = true;
                        ++cnt;
                    }
                if (cnt < k - 2) continue;
                bool adjacent = true;
                for (size_t r = 0; r < rays.size() && adjacent; ++r) {
                    if (r == p || r == q) continue;
                    bool sup = true;
                    for (size_t t = 0; t < m; ++t)
                        if (common[t] && !rays[r].zero[t]) {
                            sup = false;
                            break;
                        }
                    if (sup) adjacent = false;
                }
                if (!adjacent) continue;
                Ray nr;
                nr.v = primitive(sub(scale(rays[q].v, s[p]), scale(rays[p].v, s[q])));
                nr.zero = common;
                nr.zero[ci] = true;
                next.push_back(std::move(nr));
            }
        rays = std::move(next);
    }
    QMat out;
    for (auto& r : rays) out.push_back(r.v);
    return out;
}

QMat sorted_unique(QMat v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

Cone::Cone(int n) : n_(n), dim_(0) {
    for (int i = 0; i < n; ++i) {
        QVec e(n, Rat(0));
        e[i] = 1;
        eqs_.push_back(e);
    }
}

Cone Cone::from_generators(const QMat& gens_in, int n) {
    QMat gens;
    for (const auto& g : gens_in) {
        if (static_cast<int>(g.size()) != n) throw PreconditionError("cone generator has wrong dimension");
        if (is_zero(g)) throw PreconditionError("cone generators must be nonzero");
        gens.push_back(primitive(g));
    }
    gens = sorted_unique(gens);
    if (gens.empty()) return Cone(n);

    Cone C;
    C.n_ = n;
    QMat R = gens;
    auto piv = rref(R);
    int k = static_cast<int>(piv.size());
    C.dim_ = k;
    for (auto& e : nullspace(gens, n)) C.eqs_.push_back(primitive(e));

    QMat Y;
    for (const auto& g : gens) {
        QVec y(k);
        for (int i = 0; i < k; ++i) y[i] = g[piv[i]];
        Y.push_back(y);
    }
    QMat dual = dual_rays(Y, k);
    if (rank(dual) < k) throw PreconditionError("cone is not pointed");
    for (const auto& a : dual) {
        QVec f(n, Rat(0));
        for (int i = 0; i < k; ++i) f[piv[i]] = a[i];
        C.facets_.push_back(primitive(f));
    }
    C.facets_ = sorted_unique(C.facets_);
    for (const auto& g : gens) {
        QMat tight;
        for (const auto& f : C.facets_)
            if (dot(f, g) == 0) tight.push_back(f);
        if (rank(tight) == k - 1) C.rays_.push_back(g);
    }
    C.rays_ = sorted_unique(C.rays_);
    return C;
}

bool Cone::in_span(const QVec& u) const {
    if (static_cast<int>(u.size()) != n_) throw PreconditionError("dimension mismatch in cone membership");
    for (const auto& e : eqs_)
        if (dot(e, u) != 0) return false;
    return true;
}

bool Cone::contains(const QVec& u) const {
    if (!in_span(u)) return false;
    for (const auto& f : facets_)
        if (dot(f, u) < 0) return false;
    return true;
}

bool Cone::interior_contains(const QVec& u) const {
    if (!in_span(u)) return false;
    for (const auto& f : facets_)
        if (dot(f, u) <= 0) return false;
    return true;
}

std::vector<Cone> Cone::faces() const {
    std::vector<Cone> out;
    if (dim_ == 0) {
        out.push_back(*this);
        return out;
    }
    size_t m = rays_.size();
    std::set<std::vector<bool>> seen;
    std::deque<std::vector<bool>> queue;
    std::vector<bool> all(m, true);
    seen.insert(all);
    queue.push_back(all);
    while (!queue.empty()) {
        auto S = queue.front();
        queue.pop_front();
        for (const auto& f : facets_) {
            std::vector<bool> T(m, false);
            for (size_t i = 0; i < m; ++i) T[i] = S[i] && dot(f, rays_[i]) == 0;
            if (T != S && seen.insert(T).second) queue.push_back(T);
        }
    }
    for (const auto& S : seen) {
        QMat g;
        for (size_t i = 0; i < m; ++i)
            if (S[i]) g.push_back(rays_[i]);
        out.push_back(g.empty() ? Cone(n_) : from_generators(g, n_));
    }
    std::sort(out.begin(), out.end(), [](const Cone& a, const Cone& b) {
        if (a.dim() != b.dim()) return a.dim() < b.dim();
        return a.rays() < b.rays();
    });
    return out;
}

std::vector<Cone> Cone::facets() const {
    std::vector<Cone> out;
    for (auto& F : faces())
        if (F.dim() == dim_ - 1) out.push_back(F);
    return out;
}

bool Cone::is_face(const Cone& F) const {
    if (F.ambient_dim() != n_) return false;
    for (const auto& G : faces())
        if (G == F) return true;
    return false;
}

QVec Cone::interior_point() const {
    QVec s(n_, Rat(0));
    for (const auto& r : rays_) s = add(s, r);
    return s;
}

Cone cone_from_generators(const QMat& gens, int n) {
    return Cone::from_generators(gens, n);
}
std::vector<Cone> faces(const Cone& C) {
    return C.faces();
}
std::vector<Cone> facets(const Cone& C) {
    return C.facets();
}
bool contains(const Cone& C, const QVec& u) {
    return C.contains(u);
}
bool interior_contains(const Cone& C, const QVec& u) {
    return C.interior_contains(u);
}

Cone intersect_halfspace(const Cone& C, const QVec& h) {
    QMat gens;
    std::vector<QVec> pos, neg;
    for (const auto& r : C.rays()) {
        Rat s = dot(h, r);
        if (s >= 0) gens.push_back(r);
        if (s > 0) pos.push_back(r);
        if (s < 0) neg.push_back(r);
    }
    for (const auto& p : pos)
        for (const auto& q : neg) {
            QVec v = sub(scale(q, dot(h, p)), scale(p, dot(h, q)));
            if (!is_zero(v)) gens.push_back(v);
        }
    if (gens.empty()) return Cone(C.ambient_dim());
    return Cone::from_generators(gens, C.ambient_dim());
}

std::pair<Cone, Cone> dissect(const Cone& C, const QVec& h) {
    bool has_pos = false, has_neg = false;
    for (const auto& r : C.rays()) {
        Rat s = dot(h, r);
        if (s > 0) has_pos = true;
        if (s < 0) has_neg = true;
    }
    if (!has_pos || !has_neg) throw PreconditionError("dissecting hyperplane misses the interior of the cone");
    Cone C1 = intersect_halfspace(C, scale(h, Rat(-1)));
    Cone C2 = intersect_halfspace(C, h);
    return {C1, C2};
}

int affine_dim(const QMat& pts) {
    if (pts.empty()) return -1;
    QMat d;
    for (size_t i = 1; i < pts.size(); ++i) d.push_back(sub(pts[i], pts[0]));
    return d.empty() ? 0 : rank(d);
}

Polytope Polytope::from_points(const QMat& pts) {
    if (pts.empty()) throw PreconditionError("polytope needs at least one point");
    int n = static_cast<int>(pts[0].size());
    QMat hom;
    for (const auto& p : pts) {
        if (static_cast<int>(p.size()) != n) throw PreconditionError("polytope points of mixed dimension");
        QVec h{Rat(1)};
        h.insert(h.end(), p.begin(), p.end());
        hom.push_back(h);
    }
    Polytope P;
    P.n_ = n;
    P.hom_ = Cone::from_generators(hom, n + 1);
    P.dim_ = P.hom_.dim() - 1;
    for (const auto& r : P.hom_.rays()) {
        QVec v(r.begin() + 1, r.end());
        P.verts_.push_back(scale(v, 1 / r[0]));
    }
    P.verts_ = sorted_unique(P.verts_);
    for (const auto& f : P.hom_.facet_normals()) P.ineqs_.push_back({f[0], QVec(f.begin() + 1, f.end())});
    for (const auto& e : P.hom_.equations()) P.eqs_.push_back({e[0], QVec(e.begin() + 1, e.end())});
    return P;
}

bool Polytope::contains(const QVec& x) const {
    for (const auto& [b0, b] : eqs_)
        if (b0 + dot(b, x) != 0) return false;
    for (const auto& [a0, a] : ineqs_)
        if (a0 + dot(a, x) < 0) return false;
    return true;
}

bool Polytope::interior_contains(const QVec& x) const {
    for (const auto& [b0, b] : eqs_)
        if (b0 + dot(b, x) != 0) return false;
    for (const auto& [a0, a] : ineqs_)
        if (a0 + dot(a, x) <= 0) return false;
    return true;
}

bool Polytope::contains(const Polytope& P) const {
    for (const auto& v : P.vertices())
        if (!contains(v)) return false;
    return true;
}

std::vector<Polytope> Polytope::faces() const {
    std::vector<Polytope> out;
    for (const auto& F : hom_.faces()) {
        if (F.dim() == 0) continue;
        QMat pts;
        for (const auto& r : F.rays()) pts.push_back(scale(QVec(r.begin() + 1, r.end()), 1 / r[0]));
        out.push_back(from_points(pts));
    }
    return out;
}

std::vector<Polytope> Polytope::facets() const {
    std::vector<Polytope> out;
    for (auto& F : faces())
        if (F.dim() == dim_ - 1) out.push_back(F);
    return out;
}

QVec Polytope::centroid() const {
    QVec s(n_, Rat(0));
    for (const auto& v : verts_) s = add(s, v);
    return scale(s, Rat(1, static_cast<unsigned long>(verts_.size())));
}

std::string Polytope::str() const {
    std::string s = "conv{";
    for (size_t i = 0; i < verts_.size(); ++i) {
        if (i) s += ",";
        s += to_string(verts_[i]);
    }
    return s + "}";
}

Polytope cross_section(const Cone& C, const Hyperplane& G) {
    if (C.rays().empty()) throw PreconditionError("cross-section of the zero cone");
    QMat pts;
    for (const auto& r : C.rays()) {
        auto p = phi_image(r, G);
        if (!p) throw PreconditionError("hyperplane functional is not positive on the cone");
        pts.push_back(*p);
    }
    return Polytope::from_points(pts);
}

EpsNeighborhood::EpsNeighborhood(const Cone& C, const Hyperplane& G) : G_(G), P_(cross_section(C, G)) {
    for (auto& F : P_.faces()) {
        FaceData fd;
        fd.base = F.vertices()[0];
        QMat d;
        for (size_t i = 1; i < F.vertices().size(); ++i) d.push_back(sub(F.vertices()[i], fd.base));
        for (int i : independent_rows(d)) fd.dirs.push_back(d[i]);
        if (!fd.dirs.empty()) {
            QMat gram = matmul(fd.dirs, transpose(fd.dirs));
            fd.gram_inv = *inverse(gram);
        }
        fd.face = F;
        faces_.push_back(std::move(fd));
    }
}

Rat EpsNeighborhood::sq_distance_to(const QVec& x) const {
    if (P_.contains(x)) return 0;
    std::optional<Rat> best;
    for (const auto& fd : faces_) {
        QVec proj = fd.base;
        if (!fd.dirs.empty()) {
            QVec w = sub(x, fd.base);
            QVec rhs = matvec(fd.dirs, w);
            QVec coef = matvec(fd.gram_inv, rhs);
            for (size_t i = 0; i < fd.dirs.size(); ++i) proj = add(proj, scale(fd.dirs[i], coef[i]));
        }
        if (!fd.face.contains(proj)) continue;
        QVec diff = sub(x, proj);
        Rat d2 = dot(diff, diff);
        if (!best || d2 < *best) best = d2;
    }
    return *best;
}

bool EpsNeighborhood::contains(const QVec& u, const Rat& eps) const {
    if (is_zero(u)) return true;
    auto p = phi_image(u, G_);
    if (!p) return false;
    return sq_distance_to(*p) < eps * eps;
}

Rat sq_distance(const Polytope& P, const QVec& x) {
    // reuse the face machinery through the homogenizing cone at level x0 = 1
    Hyperplane G;
    G.a.assign(P.ambient_dim() + 1, Rat(0));
    G.a[0] = 1;
    G.level = 1;
    EpsNeighborhood N(P.homogenization(), G);
    QVec h{Rat(1)};
    h.insert(h.end(), x.begin(), x.end());
    return N.sq_distance_to(h);
}

bool eps_cone_contains(const Cone& C, const Hyperplane& G, const Rat& eps, const QVec& u) {
    if (eps <= 0) throw PreconditionError("eps must be positive");
    return EpsNeighborhood(C, G).contains(u, eps);
}

bool eps_cone_contains(const Cone& C, const Hyperplane& G, const Rat& eps, const ExpVec& u) {
    return eps_cone_contains(C, G, eps, u.to_qvec());
}

std::optional<PyramidWitness> is_pyramid(const Polytope& P) {
    if (P.dim() < 1) return std::nullopt;
    const auto& V = P.vertices();
    for (size_t i = 0; i < V.size(); ++i) {
        QMat rest;
        for (size_t k = 0; k < V.size(); ++k)
            if (k != i) rest.push_back(V[k]);
        if (affine_dim(rest) == P.dim() - 1) return PyramidWitness{V[i], Polytope::from_points(rest)};
    }
    return std::nullopt;
}

namespace {

// longest pyramid tower ending in P
const std::vector<Polytope>& tower(const Polytope& P, std::map<QMat, std::vector<Polytope>>& memo) {
    auto it = memo.find(P.vertices());
    if (it != memo.end()) return it->second;
    std::vector<Polytope> best{P};
    if (P.dim() >= 1) {
        const auto& V = P.vertices();
        for (size_t i = 0; i < V.size(); ++i) {
            QMat rest;
            for (size_t k = 0; k < V.size(); ++k)
                if (k != i) rest.push_back(V[k]);
            if (affine_dim(rest) != P.dim() - 1) continue;
            auto sub_chain = tower(Polytope::from_points(rest), memo);
            if (sub_chain.size() + 1 > best.size()) {
                best = sub_chain;
                best.push_back(P);
            }
        }
    }
    return memo.emplace(P.vertices(), std::move(best)).first->second;
}

}  // namespace

ComplexityResult complexity(const Polytope& P) {
    std::map<QMat, std::vector<Polytope>> memo;
    ComplexityResult r;
    r.chain = tower(P, memo);
    r.complexity = P.dim() - (static_cast<int>(r.chain.size()) - 1);
    return r;
}

bool is_pyramidal_extension(const Polytope& P, const Polytope& Q) {
    if (P.ambient_dim() != Q.ambient_dim()) return false;
    if (P == Q) return false;
    if (P.dim() != Q.dim() || Q.dim() < 1) return false;
    if (!Q.contains(P)) return false;
    for (const auto& v : Q.vertices()) {
        if (P.contains(v)) continue;
        QMat pts = P.vertices();
        pts.push_back(v);
        if (Polytope::from_points(pts) != Q) continue;
        int visible = 0;
        for (const auto& [a0, a] : P.inequalities())
            if (a0 + dot(a, v) < 0) ++visible;
        if (visible == 1) return true;
    }
    return false;
}

namespace {

// barycentric coordinates of x with respect to simplex vertices S (affine hull assumed)
QVec barycentric(const QMat& S, const QVec& x) {
    size_t d = S.size() - 1;
    QMat A(S[0].size() + 1, QVec(S.size()));
    QVec b(S[0].size() + 1);
    for (size_t i = 0; i <= d; ++i) {
        A[0][i] = 1;
        for (size_t k = 0; k < S[0].size(); ++k) A[k + 1][i] = S[i][k];
    }
    b[0] = 1;
    for (size_t k = 0; k < S[0].size(); ++k) b[k + 1] = x[k];
    auto sol = solve(A, b);
    if (!sol) throw Error("barycentric: point outside the affine hull");
    return *sol;
}

bool all_positive(const QVec& v) {
    for (const auto& x : v)
        if (x <= 0) return false;
    return true;
}

void next_subset(std::vector<int>& idx, int n, bool& done) {
    int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) {
        done = true;
        return;
    }
    ++idx[i];
    for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
}

}  // namespace

std::vector<Polytope> admissible_sequence(const Polytope& P, const Polytope& U, int budget) {
    if (U.ambient_dim() != P.ambient_dim()) throw PreconditionError("admissible_sequence: dimension mismatch");
    if (!P.contains(U)) throw PreconditionError("admissible_sequence: target is not inside P");
    std::vector<Polytope> seq{P};
    if (U.contains(P)) return seq;
    if (U.dim() != P.dim()) throw PreconditionError("admissible_sequence: target must have the dimension of P");
    int d = P.dim();

    auto push = [&](const Polytope& next) {
        if (static_cast<int>(seq.size()) > budget) throw BudgetExceeded("admissible_sequence: step budget exhausted");
        if (!is_pyramidal_extension(next, seq.back()))
            throw VerificationError("admissible_sequence: produced an invalid cut");
        seq.push_back(next);
    };

    // interior points of U to try as homothety centres
    QMat centres{U.centroid()};
    for (const auto& v : U.vertices()) centres.push_back(scale(add(scale(U.centroid(), Rat(3)), v), Rat(1, 4)));

    // pick a vertex simplex of P containing a centre in its interior
    const QMat& V = P.vertices();
    int nv = static_cast<int>(V.size());
    std::vector<int> target;
    QVec centre;
    for (const auto& c : centres) {
        std::vector<int> idx(d + 1);
        for (int i = 0; i <= d; ++i) idx[i] = i;
        bool done = nv < d + 1;
        while (!done) {
            QMat S;
            for (int i : idx) S.push_back(V[i]);
            if (affine_dim(S) == d && all_positive(barycentric(S, c))) {
                target = idx;
                centre = c;
                break;
            }
            next_subset(idx, nv, done);
        }
        if (!target.empty()) break;
    }
    if (target.empty()) throw BudgetExceeded("admissible_sequence: no vertex simplex around the target");

    // stage 1: cut vertices outside the chosen simplex
    QMat keep_set;
    for (int i : target) keep_set.push_back(V[i]);
    for (;;) {
        const QMat& cur = seq.back().vertices();
        if (static_cast<int>(cur.size()) == d + 1) break;
        bool cut = false;
        for (const auto& v : cur) {
            if (std::find(keep_set.begin(), keep_set.end(), v) != keep_set.end()) continue;
            QMat rest;
            for (const auto& w : cur)
                if (w != v) rest.push_back(w);
            Polytope R = Polytope::from_points(rest);
            if (R.dim() == d && is_pyramidal_extension(R, seq.back())) {
                push(R);
                cut = true;
                break;
            }
        }
        if (!cut) throw BudgetExceeded("admissible_sequence: no valid vertex cut in dimension " + std::to_string(d));
    }

    // stage 2: shrink the simplex towards the centre by edge slides
    Rat mu(1, 2);
    for (const auto& [a0, a] : U.inequalities()) {
        Rat slack = a0 + dot(a, centre);
        for (const auto& x : keep_set) {
            Rat s = dot(a, sub(x, centre));
            if (s < 0) mu = std::min<Rat>(mu, slack / (-s));
        }
    }
    QMat S = keep_set;
    for (size_t i = 0; i < S.size(); ++i) {
        QVec y = add(centre, scale(sub(keep_set[i], centre), mu));
        QVec lam = barycentric(S, y);
        // slide vertex i towards each other vertex in turn
        Rat acc = lam[i];
        for (size_t k = 0; k < S.size(); ++k) {
            if (k == i) continue;
            acc += lam[k];
            if (lam[k] == 0) continue;
            Rat t = lam[k] / acc;
            QVec xi = add(S[i], scale(sub(S[k], S[i]), t));
            QMat next = S;
            next[i] = xi;
            push(Polytope::from_points(next));
            S = next;
        }
        if (S[i] != y) throw VerificationError("admissible_sequence: slide schedule missed its target");
    }
    if (!U.contains(seq.back())) throw VerificationError("admissible_sequence: final polytope escapes the target");
    return seq;
}

bool verify_admissible(const std::vector<Polytope>& seq, const Polytope& P, const Polytope& U) {
    if (seq.empty() || seq.front() != P) return false;
    for (size_t k = 0; k < seq.size(); ++k) {
        if (!P.contains(seq[k])) return false;
        if (seq[k].dim() != P.dim()) return false;
        if (k == 0) continue;
        bool cut = is_pyramidal_extension(seq[k], seq[k - 1]);
        bool grow = seq[k].contains(seq[k - 1]) && seq[k] != seq[k - 1];
        if (cut == grow) return false;
    }
    return U.contains(seq.back());
}

}  // namespace mf
