#pragma once
// Rational polyhedral cones and polytopes at desk scale.

#include "mf/lattice.hpp"
#include "mf/linalg.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <utility>

namespace mf {

class Cone {
public:
    Cone() = default;
    // zero cone in R^n
    explicit Cone(int n);
    // throws PreconditionError if the cone contains a line
    static Cone from_generators(const QMat& gens, int n);

    int ambient_dim() const { return n_; }
    int dim() const { return dim_; }
    // primitive integer extreme rays, sorted
    const QMat& rays() const { return rays_; }
    // primitive integer normals a with a.x >= 0 on the cone, one per facet
    const QMat& facet_normals() const { return facets_; }
    // a.x = 0 for every a here cuts out the linear span
    const QMat& equations() const { return eqs_; }

    bool contains(const QVec& u) const;
    bool contains(const ExpVec& u) const { return contains(u.to_qvec()); }
    // relative interior
    bool interior_contains(const QVec& u) const;
    bool interior_contains(const ExpVec& u) const { return interior_contains(u.to_qvec()); }
    bool in_span(const QVec& u) const;

    // all faces including {0} and the cone itself
    std::vector<Cone> faces() const;
    std::vector<Cone> facets() const;
    bool is_face(const Cone& F) const;
    // sum of extreme rays (a relative interior point)
    QVec interior_point() const;

    bool operator==(const Cone& o) const { return n_ == o.n_ && rays_ == o.rays_; }

private:
    int n_ = 0;
    int dim_ = 0;
    QMat rays_;
    QMat facets_;
    QMat eqs_;
};

Cone cone_from_generators(const QMat& gens, int n);
std::vector<Cone> faces(const Cone& C);
std::vector<Cone> facets(const Cone& C);
bool contains(const Cone& C, const QVec& u);
bool interior_contains(const Cone& C, const QVec& u);
// C ∩ {h.x >= 0}
Cone intersect_halfspace(const Cone& C, const QVec& h);
// (C ∩ {h<=0}, C ∩ {h>=0}); H must meet the interior
std::pair<Cone, Cone> dissect(const Cone& C, const QVec& h);

class Polytope {
public:
    Polytope() = default;
    static Polytope from_points(const QMat& pts);

    int ambient_dim() const { return n_; }
    int dim() const { return dim_; }
    const QMat& vertices() const { return verts_; }
    // (a0, a) with a0 + a.x >= 0, one per facet
    const std::vector<std::pair<Rat, QVec>>& inequalities() const { return ineqs_; }
    // (b0, b) with b0 + b.x = 0 on the affine hull
    const std::vector<std::pair<Rat, QVec>>& equations() const { return eqs_; }

    bool contains(const QVec& x) const;
    bool interior_contains(const QVec& x) const;
    bool contains(const Polytope& P) const;
    std::vector<Polytope> faces() const;  // nonempty faces, including P
    std::vector<Polytope> facets() const;
    QVec centroid() const;
    const Cone& homogenization() const { return hom_; }

    bool operator==(const Polytope& o) const { return verts_ == o.verts_; }
    bool operator!=(const Polytope& o) const { return !(*this == o); }
    std::string str() const;

private:
    int n_ = 0;
    int dim_ = -1;
    QMat verts_;
    std::vector<std::pair<Rat, QVec>> ineqs_;
    std::vector<std::pair<Rat, QVec>> eqs_;
    Cone hom_;
};

int affine_dim(const QMat& pts);

// Φ(C) for the cross-section of C by G (g must be positive on C \ 0).
Polytope cross_section(const Cone& C, const Hyperplane& G);

// Squared distance from a point to a polytope, exact.
Rat sq_distance(const Polytope& P, const QVec& x);

// Cached face data for repeated ε-neighbourhood queries against one cross-section.
class EpsNeighborhood {
public:
    EpsNeighborhood(const Cone& C, const Hyperplane& G);
    Rat sq_distance_to(const QVec& point_on_G) const;
    // u == 0 or dist(Φ(u), Φ(C))^2 < eps^2
    bool contains(const QVec& u, const Rat& eps) const;
    bool contains(const ExpVec& u, const Rat& eps) const { return contains(u.to_qvec(), eps); }
    const Polytope& polytope() const { return P_; }
    const Hyperplane& plane() const { return G_; }

private:
    struct FaceData {
        QVec base;
        QMat dirs;
        QMat gram_inv;
        Polytope face;
    };
    Hyperplane G_;
    Polytope P_;
    std::vector<FaceData> faces_;
};

bool eps_cone_contains(const Cone& C, const Hyperplane& G, const Rat& eps, const QVec& u);
bool eps_cone_contains(const Cone& C, const Hyperplane& G, const Rat& eps, const ExpVec& u);

struct PyramidWitness {
    QVec apex;
    Polytope base;
};
std::optional<PyramidWitness> is_pyramid(const Polytope& P);

struct ComplexityResult {
    int complexity = 0;
    std::vector<Polytope> chain;  // P_0 ⊂ ... ⊂ P_i = P, each a pyramid over the previous
};
ComplexityResult complexity(const Polytope& P);

bool is_pyramidal_extension(const Polytope& P, const Polytope& Q);

// P = P_0, P_1, ... with the last one inside U; throws BudgetExceeded when the
// step budget runs out or no valid cut is found.
std::vector<Polytope> admissible_sequence(const Polytope& P, const Polytope& U, int budget = 1000);
// every step a cut or a growth, everything inside P, dimensions constant, last inside U
bool verify_admissible(const std::vector<Polytope>& seq, const Polytope& P, const Polytope& U);

}  // namespace mf
