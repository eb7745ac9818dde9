#include "doctest.h"
#include "helpers.hpp"

#include "mf/polyhedra.hpp"

using namespace mf;
using testutil::rand_int;

namespace {

QVec q(std::initializer_list<Rat> xs) {
    return QVec(xs);
}

QVec rand_qvec(int n, int64_t range) {
    QVec v(n);
    for (auto& x : v) x = testutil::rand_rat(range);
    return v;
}

void check_double_description(const Cone& C) {
    for (const auto& r : C.rays())
        for (const auto& f : C.facet_normals()) CHECK(dot(f, r) >= 0);
    for (const auto& f : C.facet_normals()) {
        QMat tight;
        for (const auto& r : C.rays())
            if (dot(f, r) == 0) tight.push_back(r);
        CHECK(rank(tight) == C.dim() - 1);
    }
}

}  // namespace

TEST_CASE("cone facets of the orthant and a non-normal cone") {
    auto C = cone_from_generators({q({1, 0}), q({0, 1})}, 2);
    auto F = facets(C);
    REQUIRE(F.size() == 2);
    CHECK(F[0].rays().size() == 1);
    auto D = cone_from_generators({q({2, 0}), q({1, 1}), q({0, 2})}, 2);
    CHECK(D.rays() == QMat{q({0, 1}), q({1, 0})});
    auto FD = facets(D);
    REQUIRE(FD.size() == 2);
    CHECK(FD[0].rays() == QMat{q({0, 1})});
    CHECK(FD[1].rays() == QMat{q({1, 0})});
}

TEST_CASE("non-pointed cones are rejected") {
    CHECK_THROWS_AS(cone_from_generators({q({1, 0}), q({-1, 0})}, 2), PreconditionError);
    CHECK_THROWS_AS(cone_from_generators({q({1, 0}), q({-1, 1}), q({0, -1})}, 2), PreconditionError);
}

TEST_CASE("contains and interior_contains") {
    auto C = cone_from_generators({q({1, 0}), q({0, 1})}, 2);
    CHECK(C.contains(q({1, 1})));
    CHECK(C.interior_contains(q({1, 1})));
    CHECK(C.contains(q({1, 0})));
    CHECK_FALSE(C.interior_contains(q({1, 0})));
    auto D = cone_from_generators({q({2, 0}), q({0, 2})}, 2);
    CHECK(D.interior_contains(ExpVec({1, 2}, 1, 2)));
}

TEST_CASE("faces include zero and the cone; lower-dimensional cones use their span") {
    auto C = cone_from_generators({q({1, 0, 0}), q({0, 1, 0}), q({0, 0, 1})}, 3);
    CHECK(faces(C).size() == 8);
    auto P = cone_from_generators({q({1, 0, 1}), q({0, 1, 1})}, 3);
    CHECK(P.dim() == 2);
    CHECK(faces(P).size() == 4);
    CHECK(P.interior_contains(q({1, 1, 2})));
    CHECK_FALSE(P.contains(q({1, 1, 1})));
}

TEST_CASE("eps_cone_contains examples") {
    auto C = cone_from_generators({q({1, 0}), q({1, 1})}, 2);
    auto G = parse_hyperplane("x1=1", 2);
    CHECK(eps_cone_contains(C, G, Rat(1, 1000), q({3, 1})));
    CHECK(eps_cone_contains(C, G, Rat(1, 2), q({1, Rat(-1, 4)})));
    CHECK_FALSE(eps_cone_contains(C, G, Rat(1, 2), q({1, -1})));
    CHECK_FALSE(eps_cone_contains(C, G, Rat(1, 2), q({-1, 0})));
    CHECK(eps_cone_contains(C, G, Rat(1, 2), q({0, 0})));
}

TEST_CASE("sq_distance against an oracle in 3d") {
    // unit square at height 1 of a cone; point above a corner
    auto P = Polytope::from_points({q({0, 0}), q({1, 0}), q({0, 1}), q({1, 1})});
    CHECK(sq_distance(P, q({2, 3})) == 1 + 4);
    CHECK(sq_distance(P, q({Rat(1, 2), 3})) == 4);
    CHECK(sq_distance(P, q({Rat(1, 2), Rat(1, 2)})) == 0);
}

TEST_CASE("dissect examples") {
    auto C = cone_from_generators({q({1, 0}), q({0, 1})}, 2);
    auto [A, B] = dissect(C, q({-1, 1}));
    CHECK(A.rays() == QMat{q({1, 0}), q({1, 1})});
    CHECK(B.rays() == QMat{q({0, 1}), q({1, 1})});
    auto D = cone_from_generators({q({2, 0}), q({0, 2})}, 2);
    CHECK_THROWS_AS(dissect(D, q({0, 1})), PreconditionError);
    auto E = cone_from_generators({q({1, -1}), q({1, 1})}, 2);
    auto [E1, E2] = dissect(E, q({0, 1}));
    CHECK(E1.rays() == QMat{q({1, -1}), q({1, 0})});
    CHECK(E2.rays() == QMat{q({1, 0}), q({1, 1})});
}

TEST_CASE("property: double description consistency on random cones") {
    for (int it = 0; it < 60; ++it) {
        int n = static_cast<int>(rand_int(2, 4));
        QMat gens;
        int m = static_cast<int>(rand_int(1, 7));
        for (int i = 0; i < m; ++i) {
            QVec v(n);
            for (int k = 0; k < n - 1; ++k) v[k] = rand_int(-4, 4);
            v[n - 1] = rand_int(1, 4);  // keeps the cone pointed
            gens.push_back(v);
        }
        auto C = cone_from_generators(gens, n);
        check_double_description(C);
        for (const auto& g : gens) CHECK(C.contains(g));
    }
}

TEST_CASE("property: dissect pieces cover the cone and meet in the cut") {
    for (int it = 0; it < 30; ++it) {
        QMat gens;
        for (int i = 0; i < 5; ++i) gens.push_back(q({rand_int(-4, 4), rand_int(-4, 4), rand_int(1, 4)}));
        auto C = cone_from_generators(gens, 3);
        QVec h = q({rand_int(-3, 3), rand_int(-3, 3), 0});
        bool pos = false, neg = false;
        for (const auto& r : C.rays()) {
            if (dot(h, r) > 0) pos = true;
            if (dot(h, r) < 0) neg = true;
        }
        if (!pos || !neg) continue;
        auto [C1, C2] = dissect(C, h);
        CHECK(C1.dim() == 3);
        CHECK(C2.dim() == 3);
        for (int s = 0; s < 40; ++s) {
            QVec x = q({testutil::rand_rat(5), testutil::rand_rat(5), testutil::rand_rat(5)});
            bool in1 = C1.contains(x), in2 = C2.contains(x);
            CHECK((in1 || in2) == C.contains(x));
            CHECK((in1 && in2) == (C.contains(x) && dot(h, x) == 0));
        }
        // a point of the cut inside C lies in both
        QVec w = add(scale(C.rays()[0], Rat(0)), C.interior_point());
        if (dot(h, w) == 0) CHECK((C1.contains(w) && C2.contains(w)));
    }
}

TEST_CASE("complexity examples") {
    auto tri = Polytope::from_points({q({0, 0}), q({1, 0}), q({0, 1})});
    CHECK(complexity(tri).complexity == 0);
    auto sq = Polytope::from_points({q({0, 0}), q({1, 0}), q({0, 1}), q({1, 1})});
    CHECK(complexity(sq).complexity == 2);
    CHECK_FALSE(is_pyramid(sq));
    auto pyr = Polytope::from_points({q({0, 0, 0}), q({1, 0, 0}), q({0, 1, 0}), q({1, 1, 0}), q({0, 0, 1})});
    auto w = is_pyramid(pyr);
    REQUIRE(w);
    CHECK(w->apex == q({0, 0, 1}));
    auto cr = complexity(pyr);
    CHECK(cr.complexity == 2);
    CHECK(cr.chain.size() == 2);
    CHECK(cr.chain.back() == pyr);
}

TEST_CASE("property: complexity is bounded and invariant under pyramid towers") {
    for (int it = 0; it < 20; ++it) {
        // random polygon in the plane z=w=0
        QMat base;
        int m = static_cast<int>(rand_int(3, 6));
        for (int i = 0; i < m; ++i) base.push_back(q({rand_int(-5, 5), rand_int(-5, 5), 0, 0}));
        auto B = Polytope::from_points(base);
        if (B.dim() < 1) continue;
        int cb = complexity(B).complexity;
        CHECK(cb <= B.dim());
        QMat pts = base;
        pts.push_back(q({rand_int(-3, 3), rand_int(-3, 3), rand_int(1, 3), 0}));
        auto P1 = Polytope::from_points(pts);
        if (P1.dim() != B.dim() + 1) continue;
        CHECK(complexity(P1).complexity == cb);
        pts.push_back(q({rand_int(-3, 3), rand_int(-3, 3), rand_int(-3, 3), rand_int(1, 3)}));
        auto P2 = Polytope::from_points(pts);
        CHECK(complexity(P2).complexity == cb);
    }
    // simplices of every dimension
    for (int d = 1; d <= 4; ++d) {
        QMat s;
        for (int i = 0; i <= d; ++i) {
            QVec v(d, Rat(0));
            if (i) v[i - 1] = rand_int(1, 5);
            s.push_back(v);
        }
        CHECK(complexity(Polytope::from_points(s)).complexity == 0);
    }
}

TEST_CASE("is_pyramidal_extension examples") {
    auto P = Polytope::from_points({q({0}), q({2})});
    auto Q = Polytope::from_points({q({0}), q({3})});
    CHECK(is_pyramidal_extension(P, Q));
    CHECK_FALSE(is_pyramidal_extension(Q, Q));
    auto sq = Polytope::from_points({q({0, 0}), q({3, 0}), q({0, 3}), q({3, 3})});
    auto inner = Polytope::from_points({q({1, 1}), q({2, 1}), q({1, 2}), q({2, 2})});
    CHECK_FALSE(is_pyramidal_extension(inner, sq));
    auto cut = Polytope::from_points({q({0, 0}), q({3, 0}), q({0, 3})});
    CHECK(is_pyramidal_extension(cut, sq));
}

TEST_CASE("admissible_sequence examples") {
    auto P = Polytope::from_points({q({0}), q({3})});
    auto U = Polytope::from_points({q({Rat(5, 4)}), q({Rat(7, 4)})});
    auto seq = admissible_sequence(P, U);
    CHECK(verify_admissible(seq, P, U));
    CHECK(admissible_sequence(U, U).size() == 1);

    auto T = Polytope::from_points({q({0, 0}), q({6, 0}), q({0, 6})});
    auto small = Polytope::from_points({q({Rat(19, 10), Rat(19, 10)}), q({Rat(21, 10), Rat(19, 10)}), q({Rat(19, 10), Rat(21, 10)})});
    auto s2 = admissible_sequence(T, small);
    CHECK(s2.size() > 1);
    CHECK(verify_admissible(s2, T, small));
}

TEST_CASE("property: admissible sequences for random polygons") {
    for (int it = 0; it < 15; ++it) {
        QMat pts;
        for (int i = 0; i < 7; ++i) pts.push_back(q({rand_int(-6, 6), rand_int(-6, 6)}));
        auto P = Polytope::from_points(pts);
        if (P.dim() != 2) continue;
        QVec c = P.centroid();
        QMat us;
        for (const auto& v : P.vertices()) us.push_back(add(c, scale(sub(v, c), Rat(1, 5))));
        auto U = Polytope::from_points(us);
        auto seq = admissible_sequence(P, U);
        CHECK(verify_admissible(seq, P, U));
    }
}

TEST_CASE("property: eps neighbourhood is monotone and contains the cone") {
    auto C = cone_from_generators({q({1, 0, 1}), q({0, 1, 1}), q({-1, 0, 1}), q({0, -1, 2})}, 3);
    auto G = parse_hyperplane("x3=1", 3);
    EpsNeighborhood N(C, G);
    for (int it = 0; it < 100; ++it) {
        QVec u = q({testutil::rand_rat(3), testutil::rand_rat(3), Rat(rand_int(1, 3))});
        Rat e1(rand_int(1, 8), 4), e2 = e1 + Rat(rand_int(0, 4), 4);
        if (N.contains(u, e1)) CHECK(N.contains(u, e2));
        if (C.contains(u)) CHECK(N.contains(u, Rat(1, 1000)));
    }
}
