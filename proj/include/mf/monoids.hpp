#pragma once
// Affine positive monoids in Z^n and their c-divisible hulls.

#include "mf/polyhedra.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace mf {

class AffineMonoid {
public:
    AffineMonoid() = default;
    // generators must be integral and nonzero; throws if the cone contains a line
    static AffineMonoid from_generators(const std::vector<ExpVec>& gens);
    static AffineMonoid from_qmat(const QMat& gens, int c);
    // the monoid {0} in Z^n
    static AffineMonoid trivial(int n, int c);

    int ambient_dim() const { return n_; }
    int base() const { return c_; }
    int rank() const { return cone_.dim(); }
    const std::vector<ExpVec>& generators() const { return gens_; }
    const Cone& cone() const { return cone_; }
    // HNF basis of gp(M)
    const ZMat& group_basis() const { return gp_; }
    bool is_simplicial() const { return static_cast<int>(cone_.rays().size()) == rank(); }
    // generators on the extreme rays of the cone
    std::vector<ExpVec> extreme_generators() const;
    // functional with a.x > 0 on the cone minus 0 (sum of facet normals)
    const QVec& degree() const { return deg_; }

    bool in_group(const ExpVec& integral) const;
    // u in gp(M) ⊗ Z[1/c]
    bool in_localized_group(const ExpVec& u) const;

    // u ∈ M/c^j for j = denom_pow(u)
    bool contains(const ExpVec& u) const;
    // u = 0 or (u ∈ M/c^j and u in the relative interior of the cone)
    bool interior_contains(const ExpVec& u) const;
    // u ∈ (M_*)^{c^{-∞}}
    bool hull_interior_contains(const ExpVec& u) const;
    // u ∈ M^{c^{-∞}}
    bool hull_contains(const ExpVec& u) const;

    std::string str() const;

private:
    bool member_integral(const std::vector<int64_t>& u) const;

    int n_ = 0;
    int c_ = 2;
    std::vector<ExpVec> gens_;
    Cone cone_;
    ZMat gp_;
    QVec deg_;
};

bool membership(const AffineMonoid& M, const ExpVec& u);
bool interior_membership(const AffineMonoid& M, const ExpVec& u);

// Calls f on every point x of L ∩ C with deg.x <= bound (x != 0).
void for_each_lattice_point(const Cone& C, const ZMat& lattice_basis, const QVec& deg, const Rat& bound,
                            long max_points, const std::function<void(const QVec&)>& f);
// shortest vector of L on the ray R_+ r
QVec lattice_ray_generator(const QVec& r, const ZMat& lattice_basis);

// Minimal generators of C ∩ L where L is the row lattice of lattice_basis
// (Z^n when empty). Throws BudgetExceeded beyond max_points candidates.
std::vector<ExpVec> hilbert_basis(const Cone& C, int c, const ZMat& lattice_basis = {}, long max_points = 4000000);
AffineMonoid normalization(const AffineMonoid& M);
bool is_normal(const AffineMonoid& M);
AffineMonoid face_restrict(const AffineMonoid& M, const Cone& F);
// gp(M) ∩ R_+ W for a polytope W lying in a hyperplane cross-section
AffineMonoid polytope_restrict(const AffineMonoid& M, const Polytope& W);
bool seminormal_check(const AffineMonoid& M);

// An element of M_*/c^j carried with its hull level.
struct HullElem {
    ExpVec u;
    int level = 0;
};

struct FreeCover {
    std::vector<ExpVec> basis;             // free basis of L, inside (M_*)^{c^{-∞}}
    std::vector<std::vector<Int>> coords;  // coords[s][i]: coefficient of basis[i] in S[s]
};
// Throws PreconditionError when S has a non-interior element or M is not simplicial.
FreeCover free_cover(const AffineMonoid& M, const std::vector<ExpVec>& S, int max_depth = 40);
// re-checks independence, interiority and expansions
bool verify_free_cover(const AffineMonoid& M, const std::vector<ExpVec>& S, const FreeCover& L);

struct DegreeDecomposition {
    std::vector<ExpVec> parts;
    int depth = 0;  // denominators c^depth were needed
};
DegreeDecomposition degree_decomposition(const AffineMonoid& M, const QVec& h, const ExpVec& m, int max_depth = 30);

struct ShearResult {
    std::vector<std::vector<int64_t>> T;  // unimodular, acts on column vectors
    AffineMonoid sheared;
    int64_t k = 0;
};
// Searches shears x_1 += k (x_2 + ... + x_n) with |k| <= max_k making all
// pairwise inner products of extreme generators nonnegative; nullopt when none works.
std::optional<ShearResult> acuteness_shear(const AffineMonoid& M, const Hyperplane& H, int64_t max_k = 64);
ExpVec apply_integer_map(const std::vector<std::vector<int64_t>>& T, const ExpVec& u);
bool is_acute(const std::vector<ExpVec>& rays);

}  // namespace mf
