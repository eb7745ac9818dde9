#include "doctest.h"
#include "helpers.hpp"

#include "mf/separation.hpp"

using namespace mf;
using testutil::rand_int;

namespace {

RingElem el(const std::string& s, int n = 2) {
    return parse_elem(s, n, 2);
}

SepGeometry quadrant_geo() {
    return SepGeometry::make(Cone::from_generators({{1, 0}, {0, 1}}, 2), Hyperplane{{1, 1}, 1});
}

// cone spanned by (1,-1) and (1,1): the cut x2 = 0 dissects it and it is acute
SepGeometry wedge_geo() {
    return SepGeometry::make(Cone::from_generators({{1, -1}, {1, 1}}, 2), Hyperplane{{1, 0}, 1});
}

AffineMonoid wedge_monoid() {
    return AffineMonoid::from_qmat({{1, -1}, {1, 0}, {1, 1}}, 2);
}

AffineMonoid veronese() {
    return AffineMonoid::from_qmat({{2, 0}, {1, 1}, {0, 2}}, 2);
}

RingMatrix zero(int r) {
    return RingMatrix(r, 2, 2);
}

// random term a*(x1, x2) in the wedge with x2 = nn
RingElem wedge_term(int64_t nn, int64_t extra) {
    int64_t x1 = std::abs(nn) + extra;
    return RingElem::monomial(ExpVec({x1, nn}, 0, 2), Rat(rand_int(1, 4) * (rand_int(0, 1) ? 1 : -1)));
}

std::set<ExpVec> supp_of(const RingMatrix& A) {
    return mat_support(A);
}

bool provenance(const std::set<ExpVec>& inputs, const std::vector<std::set<ExpVec>>& outputs) {
    for (const auto& s : outputs)
        for (const auto& u : s)
            if (!generated_by(inputs, u)) return false;
    return true;
}

}  // namespace

TEST_CASE("geometry of the class tests") {
    auto geo = quadrant_geo();
    CHECK(geo.gram == QMat{{1, 0}, {0, 1}});
    CHECK(geo.phi_n(ExpVec({3, 1}, 0, 2)) == Rat(1, 4));
    CHECK(geo.b_prime(ExpVec({3, 1}, 0, 2), Rat(1, 4), Rat(3)));
    CHECK_FALSE(geo.b_prime(ExpVec({3, 1}, 0, 2), Rat(1, 4), Rat(4)));
    CHECK_FALSE(geo.b_prime(ExpVec::zero(2, 2), Rat(-1), Rat(0)));
    // an obtuse cone gets a corrected metric that is acute on it
    auto obtuse = SepGeometry::make(Cone::from_generators({{1, -3}, {1, 3}}, 2), Hyperplane{{1, 0}, 1});
    QVec r1{1, -3}, r2{1, 3};
    Rat ip = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) ip += r1[i] * obtuse.gram[i][j] * r2[j];
    CHECK(ip >= 0);
}

TEST_CASE("l_bound") {
    auto geo = wedge_geo();
    Rat l1 = l_bound(Rat(1), Rat(1, 4), Rat(1, 4), geo);
    Rat l2 = l_bound(Rat(1), Rat(1, 4), Rat(1, 8), geo);
    CHECK(l2 >= l1);
    CHECK(l_bound(Rat(1), Rat(1), Rat(1000), geo) <= Rat(1));
    CHECK(l_bound(Rat(0), Rat(1), Rat(1, 100), geo) == 0);

    // the implication on random samples: left/right multipliers with n >= -eps1
    // keep B(-eps2, l) inside B(-eps2 - eps, l)
    Rat eps1 = 1, eps2 = Rat(1, 4), eps = Rat(1, 4);
    Rat l = l_bound(eps1, eps2, eps, geo);
    int checked = 0;
    for (int t = 0; t < 400; ++t) {
        ExpVec x({rand_int(1, 60), 0}, 0, 2);
        x = ExpVec({x.num(0), rand_int(-x.num(0), x.num(0))}, 0, 2);
        if (!geo.b_prime(x, -eps2, l)) continue;
        ExpVec m1({1, -1}, 0, 2), m2({rand_int(1, 3), 0}, 0, 2);
        if (rand_int(0, 1)) m1 = ExpVec({2, -1}, 0, 2);
        for (const auto& y : {x + m1, x + m2, x + m1 + m2}) CHECK(geo.b_prime(y, -eps2 - eps, l));
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("com1 examples") {
    auto geo = quadrant_geo();
    auto res = com1(1, 2, el("(1,0)"), el("(1,1)"), zero(2), Rat(1), Rat(1, 2), Rat(100), geo);
    CHECK(res.gamma.is_zero());
    RingMatrix A = zero(2);
    A.at(0, 1) = el("-(3,1)");
    A.at(1, 0) = el("(1,1)");
    CHECK(res.A == A);
    CHECK(res.B.is_zero());
    RingMatrix D = zero(2);
    D.at(0, 0) = el("-(2,1)");
    D.at(1, 1) = el("(2,1)");
    CHECK(res.D == D);

    // a constant alpha is allowed
    auto rc = com1(1, 2, el("3"), el("(1,1)"), zero(2), Rat(1), Rat(1, 2), Rat(100), geo);
    RingMatrix lhs = elementary(2, 2, 1, el("(1,1)")) * elementary(2, 1, 2, el("3"));
    RingMatrix rhs = elementary(2, 1, 2, el("3")) * elementary(2, 1, 2, rc.gamma) *
                     (RingMatrix::identity(2, 2, 2) + rc.A + rc.B + rc.D);
    CHECK(lhs == rhs);

    CHECK_THROWS_AS(com1(1, 2, el("(0,1)"), el("(1,1)"), zero(2), Rat(1), Rat(1, 2), Rat(100), geo), PreconditionError);
    CHECK_THROWS_AS(com1(1, 2, el("(1,0)"), el("(1,0)"), zero(2), Rat(1), Rat(1, 2), Rat(100), geo), PreconditionError);
    CHECK_THROWS_AS(com1(1, 2, el("(1,0)+(2,0)"), el("(1,1)"), zero(2), Rat(1), Rat(1, 2), Rat(100), geo),
                    PreconditionError);
}

TEST_CASE("com1 with a negative alpha produces gamma") {
    auto geo = wedge_geo();
    // alpha_n = -1, beta_n = 2: the ij entry starts with -alpha^2 beta of n-coordinate 0
    RingElem alpha = el("(1,-1)"), beta = el("(2,2)");
    auto res = com1(1, 2, alpha, beta, zero(2), Rat(2), Rat(1, 4), Rat(50), geo);
    CHECK_FALSE(res.gamma.is_zero());
    for (const auto& t : res.gamma.terms()) {
        CHECK(nth_coord(t.first) >= -1);
        CHECK(nth_coord(t.first) < 2);
    }
    CHECK(class_check(res.A, {MatClass::A, Rat(2), Rat(1), std::nullopt}));
    CHECK(class_check(res.D, {MatClass::D, Rat(0), Rat(1), std::nullopt}));
    CHECK(geo.b_prime(res.B.at(0, 1), Rat(-1, 4), Rat(50)));
    std::set<ExpVec> in{ExpVec({1, -1}, 0, 2), ExpVec({2, 2}, 0, 2)};
    CHECK(provenance(in, {support(res.gamma), supp_of(res.A), supp_of(res.B), supp_of(res.D)}));
}

TEST_CASE("com2 examples") {
    auto geo = quadrant_geo();
    auto r0 = com2(zero(2), zero(2), Rat(1), Rat(1, 2), Rat(100), geo);
    CHECK(r0.E.empty());
    CHECK((r0.A.is_zero() && r0.B.is_zero() && r0.D.is_zero()));

    RingMatrix A = zero(2);
    A.at(0, 1) = el("(1,2)");
    auto r1 = com2(A, zero(2), Rat(1), Rat(1, 2), Rat(100), geo);
    CHECK(r1.E.empty());
    CHECK(r1.A == A);

    A.at(0, 1) = el("(1,0)");
    auto r2 = com2(A, zero(2), Rat(1), Rat(1, 2), Rat(100), geo);
    REQUIRE(r2.E.size() == 1);
    CHECK(r2.E[0] == ElemFactor{1, 2, el("-(1,0)")});
    CHECK((r2.A.is_zero() && r2.B.is_zero() && r2.D.is_zero()));

    // low terms meeting other entries produce several rounds
    RingMatrix A3 = zero(3);
    A3.at(0, 1) = RingElem::monomial(ExpVec({1, 0}, 0, 2));
    A3.at(1, 2) = RingElem::monomial(ExpVec({0, 1}, 0, 2));
    A3.at(1, 0) = RingElem::monomial(ExpVec({2, 0}, 0, 2));
    auto r3 = com2(A3, RingMatrix(3, 2, 2), Rat(1), Rat(1, 2), Rat(4), geo);
    auto X = word_eval(r3.E, 3, 2, 2) * (RingMatrix::identity(3, 2, 2) + A3);
    CHECK(X == RingMatrix::identity(3, 2, 2) + r3.A + r3.B + r3.D);
    for (const auto& x : r3.E)
        for (const auto& t : x.lambda.terms()) {
            CHECK(nth_coord(t.first) >= 0);
            CHECK(nth_coord(t.first) < 1);
        }
}

TEST_CASE("com3 examples") {
    auto geo = quadrant_geo();
    RingMatrix A = zero(2);
    A.at(1, 0) = el("(1,1)");
    auto res = com3(1, 2, el("(1,0)"), A, zero(2), zero(2), Rat(1), Rat(1, 4), Rat(1, 4), Rat(100), geo);
    RingMatrix lhs = (RingMatrix::identity(2, 2, 2) + A) * elementary(2, 1, 2, el("(1,0)"));
    RingMatrix rhs = elementary(2, 1, 2, el("(1,0)")) * word_eval(res.E, 2, 2, 2) *
                     (RingMatrix::identity(2, 2, 2) + res.A + res.B + res.D);
    CHECK(lhs == rhs);

    auto rc = com3(1, 2, el("2"), A, zero(2), zero(2), Rat(1), Rat(1, 4), Rat(1, 4), Rat(100), geo);
    lhs = (RingMatrix::identity(2, 2, 2) + A) * elementary(2, 1, 2, el("2"));
    rhs = elementary(2, 1, 2, el("2")) * word_eval(rc.E, 2, 2, 2) * (RingMatrix::identity(2, 2, 2) + rc.A + rc.B + rc.D);
    CHECK(lhs == rhs);

    auto r0 = com3(1, 2, el("(1,0)"), zero(2), zero(2), zero(2), Rat(1), Rat(1, 4), Rat(1, 4), Rat(100), geo);
    CHECK(r0.E.empty());
    CHECK((r0.A.is_zero() && r0.B.is_zero() && r0.D.is_zero()));

    // l below the bound is rejected when alpha_n < 0
    auto wg = wedge_geo();
    CHECK_THROWS_AS(com3(1, 2, el("(1,-1)"), zero(2), zero(2), zero(2), Rat(2), Rat(1, 4), Rat(1, 4), Rat(1), wg),
                    PreconditionError);
}

TEST_CASE("random commuting rules keep identities, classes and provenance") {
    auto geo = wedge_geo();
    Rat eps1 = 2, eps2 = Rat(1, 4), eps = Rat(1, 4);
    Rat l = l_bound(Rat(1), eps2, eps, geo);
    for (int t = 0; t < 30; ++t) {
        int r = static_cast<int>(rand_int(2, 3));
        int i = static_cast<int>(rand_int(1, r)), j;
        do j = static_cast<int>(rand_int(1, r));
        while (j == i);
        RingElem alpha = wedge_term(rand_int(-1, 1), rand_int(0, 2));
        RingElem beta = wedge_term(rand_int(2, 3), rand_int(0, 2));
        RingMatrix D(r, 2, 2);
        if (rand_int(0, 1)) D.at(i - 1, i - 1) = wedge_term(0, 1);
        if (rand_int(0, 1)) D.at(j - 1, j - 1) = wedge_term(rand_int(0, 1), 1);

        auto c1 = com1(i, j, alpha, beta, D, eps1, eps2, l, geo);
        std::set<ExpVec> in = support(alpha);
        for (const auto& u : support(beta)) in.insert(u);
        for (const auto& u : mat_support(D)) in.insert(u);
        CHECK(provenance(in, {support(c1.gamma), supp_of(c1.A), supp_of(c1.B), supp_of(c1.D)}));

        RingMatrix A(r, 2, 2);
        A.at(j - 1, i - 1) = beta;
        auto c3 = com3(i, j, alpha, A, RingMatrix(r, 2, 2), D, eps1, eps2, eps, l, geo);
        CHECK(class_check(c3.A, {MatClass::A, eps1, Rat(1), std::nullopt}));
        CHECK(class_check(c3.D, {MatClass::D, Rat(0), Rat(1), std::nullopt}));
        for (int p = 0; p < r; ++p)
            for (int q = 0; q < r; ++q) CHECK(geo.b_prime(c3.B.at(p, q), -eps2 - eps, l));
        std::set<ExpVec> s3;
        for (const auto& x : c3.E)
            for (const auto& u : support(x.lambda)) s3.insert(u);
        CHECK(provenance(in, {s3, supp_of(c3.A), supp_of(c3.B), supp_of(c3.D)}));
    }
}

TEST_CASE("separation problem coordinates") {
    auto M = veronese();
    SeparationProblem P(M, Hyperplane{{-1, 1}, 0}, Hyperplane{{1, 1}, 2}, Rat(1, 2), 3);
    CHECK(is_normal(P.internal_monoid()));
    CHECK(P.internal_monoid().group_basis() == ZMat{{1, 0}, {0, 1}});
    for (const char* s : {"(1,1)", "(3,1)", "(1,3)", "(5,3)/2^2"}) {
        ExpVec x = parse_expvec(s, 2);
        ExpVec z = P.to_internal(x);
        CHECK(P.to_original(z) == x);
        // the internal n-coordinate has the sign of x2 - x1
        Rat h = x.coord(1) - x.coord(0);
        CHECK((nth_coord(z) > 0) == (h > 0));
        CHECK((nth_coord(z) == 0) == (h == 0));
    }
    CHECK(P.eps_internal() > 0);
    CHECK_THROWS_AS(SeparationProblem(M, Hyperplane{{0, 1}, 0}, Hyperplane{{1, 1}, 2}, Rat(1, 2), 3), PreconditionError);
    auto nonnormal = AffineMonoid::from_qmat({{2, 0}, {0, 2}, {1, 1}, {3, 0}}, 2);
    CHECK_THROWS_AS(SeparationProblem(nonnormal, Hyperplane{{-1, 1}, 0}, Hyperplane{{1, 1}, 2}, Rat(1, 2), 3),
                    PreconditionError);
}

TEST_CASE("goodrep_normalize") {
    auto M = wedge_monoid();
    SeparationProblem P(M, Hyperplane{{0, 1}, 0}, Hyperplane{{1, 0}, 1}, Rat(1, 2), 3);
    // a single factor on the cut: nothing to do beyond the Frobenius level
    ElemWord w1 = {{1, 2, el("(1,0)")}};
    auto g1 = goodrep_normalize(P.to_internal(w1), P);
    CHECK(g1.j == 0);
    CHECK(g1.word == P.to_internal(w1));

    // a positive factor needs a Frobenius power before its translates reach C1(eps)
    ElemWord w2 = {{1, 2, el("(2,1)")}};
    auto g2 = goodrep_normalize(P.to_internal(w2), P);
    CHECK(g2.j >= 1);
    for (const auto& x : g2.word) CHECK(length_condition(x.lambda.terms()[0].first, P));
    SeparationConfig nofrob;
    nofrob.allow_roots = false;
    CHECK_THROWS_AS(goodrep_normalize(P.to_internal(w2), P, nofrob), BudgetExceeded);

    // n-coordinate -2 becomes four commutator factors of n-coordinate -1
    ElemWord w3 = {{1, 2, el("3*(3,-2)")}};
    auto g3 = goodrep_normalize(P.to_internal(w3), P);
    CHECK(g3.j == 0);
    CHECK(g3.word.size() == 4);
    for (const auto& x : g3.word) CHECK(nth_coord(x.lambda.terms()[0].first) == -1);
    CHECK(word_eval(g3.word, 3, 2, 2) == word_eval(P.to_internal(w3), 3, 2, 2));

    // the same factor with r = 2 has no third index
    SeparationProblem P2(M, Hyperplane{{0, 1}, 0}, Hyperplane{{1, 0}, 1}, Rat(1, 2), 2);
    CHECK_THROWS_AS(goodrep_normalize(P2.to_internal(ElemWord{{1, 2, el("(3,-2)")}}), P2), PreconditionError);

    // every output n-coordinate is an integer, and the product is the Frobenius image
    for (int t = 0; t < 10; ++t) {
        ElemWord w;
        for (int k = 0; k < 3; ++k) {
            int p = static_cast<int>(rand_int(1, 3)), q;
            do q = static_cast<int>(rand_int(1, 3));
            while (q == p);
            int64_t x2 = rand_int(-3, 3);
            w.push_back({p, q, RingElem::monomial(ExpVec({std::abs(x2) + rand_int(1, 2), x2}, 0, 2), Rat(1))});
        }
        auto g = goodrep_normalize(P.to_internal(w), P);
        for (const auto& x : g.word) {
            Rat un = nth_coord(x.lambda.terms()[0].first);
            CHECK(un.get_den() == 1);
            CHECK(un >= -1);
        }
        CHECK(word_eval(g.word, 3, 2, 2) == mat_frobenius(word_eval(P.to_internal(w), 3, 2, 2), g.j));
    }
}

TEST_CASE("almost separation examples") {
    auto M = wedge_monoid();
    SeparationProblem P(M, Hyperplane{{0, 1}, 0}, Hyperplane{{1, 0}, 1}, Rat(1, 2), 2);

    // already ordered: the C1 factor first, then the C2 factor
    ElemWord w = {{2, 1, el("(2,-1)")}, {1, 2, el("(2,1)")}};
    auto cert = almost_separate(P, w);
    CHECK(verify_separation(P, w, cert).ok);

    // a single factor on the cut stays on the left
    ElemWord w1 = {{1, 2, el("(1,0)")}};
    auto c1 = almost_separate(P, w1);
    CHECK(c1.A1 == w1);
    CHECK(c1.A2.is_identity());

    // wrong order needs commuting, and the Frobenius power then needs a third index
    ElemWord w2 = {{1, 2, el("(2,1)")}, {2, 1, el("(2,-1)")}};
    CHECK_THROWS_AS(almost_separate(P, w2), PreconditionError);
    SeparationProblem P3(M, Hyperplane{{0, 1}, 0}, Hyperplane{{1, 0}, 1}, Rat(1, 2), 3);
    auto c2 = almost_separate(P3, w2);
    CHECK(verify_separation(P3, w2, c2).ok);
    CHECK(c2.com3_calls >= 1);
}

TEST_CASE("almost separation over the Veronese monoid") {
    auto M = veronese();
    SeparationProblem P(M, Hyperplane{{-1, 1}, 0}, Hyperplane{{1, 1}, 2}, Rat(1, 2), 3);
    std::vector<ExpVec> pool;
    for (const char* s : {"(1,1)", "(2,2)", "(3,1)", "(1,3)", "(4,2)", "(2,4)"}) pool.push_back(parse_expvec(s, 2));
    for (int t = 0; t < 5; ++t) {
        ElemWord w;
        int len = static_cast<int>(rand_int(1, 4));
        for (int k = 0; k < len; ++k) {
            int p = static_cast<int>(rand_int(1, 3)), q;
            do q = static_cast<int>(rand_int(1, 3));
            while (q == p);
            w.push_back({p, q, RingElem::monomial(pool[static_cast<size_t>(rand_int(0, 5))], Rat(rand_int(1, 3)))});
        }
        auto cert = almost_separate(P, w);
        CHECK(verify_separation(P, w, cert).ok);
    }
}

TEST_CASE("verification rejects corrupted certificates") {
    auto M = wedge_monoid();
    SeparationProblem P(M, Hyperplane{{0, 1}, 0}, Hyperplane{{1, 0}, 1}, Rat(1, 2), 3);
    ElemWord w = {{1, 2, el("(2,1)")}, {2, 1, el("(2,-1)")}};
    auto cert = almost_separate(P, w);
    REQUIRE(verify_separation(P, w, cert).ok);

    auto bad = cert;
    bad.A2.at(0, 0) += el("(5,1)");
    auto r = verify_separation(P, w, bad);
    CHECK_FALSE(r.ok);
    CHECK(r.failure.find("product identity") != std::string::npos);

    bad = cert;
    bad.j_A = -1;
    CHECK_FALSE(verify_separation(P, w, bad).ok);

    // a factor moved from A1 into A2 keeps the product but breaks the sides
    if (!cert.A1.empty()) {
        bad = cert;
        auto last = bad.A1.back();
        bad.A1.pop_back();
        bad.A2 = elementary(3, last.p, last.q, last.lambda) * bad.A2;
        CHECK_FALSE(verify_separation(P, w, bad).ok);
    }
}
