#include "doctest.h"
#include "helpers.hpp"

#include "mf/descent.hpp"

using namespace mf;
using testutil::rand_int;

namespace {

RingElem el(const std::string& s, int n = 2, Field f = {}) {
    return parse_elem(s, n, 2, f);
}

// [[1 + t1 t2, -t1^2], [t2^2, 1 - t1 t2]] in the corner of a 3x3 identity
RingMatrix cohn(int r = 3, Field f = {}) {
    RingMatrix A = RingMatrix::identity(r, 2, 2, f);
    A.at(0, 0) = el("1 + (1,1)", 2, f);
    A.at(0, 1) = el("-(2,0)", 2, f);
    A.at(1, 0) = el("(0,2)", 2, f);
    A.at(1, 1) = el("1 - (1,1)", 2, f);
    return A;
}

AffineMonoid veronese() {
    return AffineMonoid::from_qmat({{2, 0}, {1, 1}, {0, 2}}, 2);
}

AffineMonoid square_cone() {
    return AffineMonoid::from_qmat({{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}}, 2);
}

ElemWord rand_poly_word(int r, int len, int n, int64_t deg, Field f = {}) {
    ElemWord w;
    for (int i = 0; i < len; ++i) {
        int p = static_cast<int>(rand_int(1, r)), q;
        do q = static_cast<int>(rand_int(1, r));
        while (q == p);
        RingElem lam = testutil::rand_elem(n, 2, static_cast<int>(rand_int(1, 2)), deg, 0, f);
        if (!lam.is_zero()) w.push_back({p, q, lam});
    }
    return w;
}

RingMatrix eval(const ElemWord& w, int r, int n, Field f = {}) {
    return word_eval(w, r, n, 2, f);
}

}  // namespace

TEST_CASE("leading-term division") {
    for (int t = 0; t < 60; ++t) {
        auto a = testutil::rand_elem(2, 2, 4, 4, 0);
        auto b = testutil::rand_elem(2, 2, 2, 3, 0);
        if (b.is_zero()) continue;
        auto [q, rem] = lead_divmod(a, b);
        CHECK(q * b + rem == a);
        const ExpVec& lb = b.terms().back().first;
        for (const auto& [u, coef] : rem.terms()) {
            bool divisible = true;
            for (int i = 0; i < 2; ++i)
                if (u.num(i) < lb.num(i)) divisible = false;
            CHECK_FALSE(divisible);
        }
    }
    CHECK_THROWS_AS(lead_divmod(el("(1,0)"), RingElem(2, 2)), PreconditionError);
}

TEST_CASE("univariate base factorizer: examples") {
    // [[0,1],[-1,0]] = e12(1) e21(-1) e12(1), checked by multiplication
    RingMatrix J(2, 1, 2);
    J.at(0, 1) = parse_elem("1", 1, 2);
    J.at(1, 0) = parse_elem("-1", 1, 2);
    ElemWord w = base_factor_univariate(J);
    ElemWord expect = {{1, 2, parse_elem("1", 1, 2)}, {2, 1, parse_elem("-1", 1, 2)}, {1, 2, parse_elem("1", 1, 2)}};
    CHECK(word_eval(expect, 2, 1, 2) == J);
    CHECK(w == expect);

    RingElem t3 = parse_elem("(3)", 1, 2);
    ElemWord one = base_factor_univariate(elementary(2, 1, 2, t3));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == ElemFactor{1, 2, t3});

    RingMatrix D = RingMatrix::identity(2, 1, 2);
    D.at(0, 0) = parse_elem("2", 1, 2);
    CHECK_THROWS_AS(base_factor_univariate(D), PreconditionError);
    CHECK_THROWS_AS(base_factor_univariate(cohn()), PreconditionError);
    CHECK(base_factor_univariate(RingMatrix::identity(3, 1, 2)).empty());
}

TEST_CASE("univariate base factorizer: random round trips") {
    for (Field f : {Field{}, Field{7}}) {
        for (int t = 0; t < 40; ++t) {
            int r = static_cast<int>(rand_int(2, 4));
            auto w = rand_poly_word(r, static_cast<int>(rand_int(0, 10)), 1, 5, f);
            RingMatrix A = eval(w, r, 1, f);
            CHECK(eval(base_factor_univariate(A), r, 1, f) == A);
        }
    }
    // one variable inside a larger ambient space
    RingMatrix A = elementary(3, 2, 1, el("(0,3)")) * elementary(3, 1, 3, el("1 + (0,1)"));
    CHECK(eval(base_factor_univariate(A), 3, 2) == A);
}

TEST_CASE("elimination stalls on the 2x2 Cohn matrix") {
    RingMatrix C2 = cohn(2);
    CHECK(is_SL(C2));
    CHECK_FALSE(eliminate(C2).has_value());
    CHECK_THROWS_AS(base_factor_multivariate_heuristic(C2), PreconditionError);
}

TEST_CASE("multivariate heuristic") {
    auto w = base_factor_multivariate_heuristic(cohn());
    REQUIRE(w.has_value());
    CHECK(eval(*w, 3, 2) == cohn());
    auto wp = base_factor_multivariate_heuristic(cohn(3, Field{5}));
    REQUIRE(wp.has_value());
    CHECK(eval(*wp, 3, 2, Field{5}) == cohn(3, Field{5}));

    // diag(u, 1/u, 1): a short word from the Whitehead identity
    RingMatrix D = RingMatrix::identity(3, 2, 2);
    D.at(0, 0) = el("3");
    D.at(1, 1) = el("1/3");
    auto wd = base_factor_multivariate_heuristic(D);
    REQUIRE(wd.has_value());
    CHECK(eval(*wd, 3, 2) == D);
    CHECK(wd->size() <= 6);

    RingElem lam = el("(1,2)");
    auto we = base_factor_multivariate_heuristic(elementary(3, 1, 3, lam));
    REQUIRE(we.has_value());
    REQUIRE(we->size() == 1);
    CHECK((*we)[0] == ElemFactor{1, 3, lam});

    // never a wrong word
    int solved = 0;
    for (int t = 0; t < 40; ++t) {
        auto rw = rand_poly_word(3, static_cast<int>(rand_int(1, 6)), 2, 3);
        RingMatrix A = eval(rw, 3, 2);
        auto got = base_factor_multivariate_heuristic(A);
        if (got) {
            ++solved;
            CHECK(eval(*got, 3, 2) == A);
        }
    }
    CHECK(solved > 0);
    MESSAGE("heuristic solved " << solved << " of 40 random products");
}

TEST_CASE("oracle factorizer") {
    ElemWord cw = {{1, 3, el("(1,0)")}, {2, 3, el("(0,1)")}, {3, 1, el("(0,1)")}, {3, 2, el("-(1,0)")},
                   {1, 3, el("-(1,0)")}, {2, 3, el("-(0,1)")}, {3, 1, el("-(0,1)")}, {3, 2, el("(1,0)")}};
    REQUIRE(eval(cw, 3, 2) == cohn());
    BaseFactorizer o = oracle_factorizer({{"cohn", cohn(), cw}});
    CHECK(o.applies(cohn()));
    CHECK(*o.factor(cohn()) == cw);
    RingMatrix B = elementary(3, 1, 2, el("(3,1)")) * cohn();
    auto wb = o.factor(B);
    REQUIRE(wb.has_value());
    CHECK(eval(*wb, 3, 2) == B);
    ElemWord bad = cw;
    bad[0].lambda = el("(2,0)");
    CHECK_THROWS_AS(oracle_factorizer({{"bad", cohn(), bad}}), VerificationError);
}

TEST_CASE("transport along a free basis") {
    std::vector<ExpVec> basis = {ExpVec({1, 1}, 1, 2), ExpVec({1, 3}, 1, 2)};
    RingMatrix A = elementary(3, 1, 2, el("(1,2) + 2*(3,5)")) * elementary(3, 3, 1, el("(1,1)/2^1"));
    RingMatrix P = transport_to_polynomial(A, basis);
    CHECK(is_polynomial_matrix(P));
    auto w = base_factor_multivariate_heuristic(P);
    REQUIRE(w.has_value());
    CHECK(eval(pull_back(*w, basis), 3, 2) == A);
    CHECK_THROWS_AS(transport_to_polynomial(elementary(3, 1, 2, el("(1,0)")), basis), PreconditionError);
}

TEST_CASE("facet reduction") {
    auto M = veronese();
    DescentConfig cfg;
    SubFactorizer sub = [&](const RingMatrix& B, const AffineMonoid& MF) { return factorize(B, MF, cfg); };

    // the facet on the ray (1,0) sees e12(-t1^2) first
    auto F0 = M.cone().facets()[0];
    RingMatrix A = cohn();
    FacetReduction fr = facet_reduce(A, M, sub);
    REQUIRE(fr.steps.size() == 2);
    CHECK(eval(fr.word, 3, 2) * fr.residual == mat_frobenius(A, fr.level));
    std::vector<Cone> faces;
    for (const auto& s : fr.steps) faces.push_back(s.face);
    CHECK(processed_face_exclusion(fr.residual, faces));
    for (const auto& u : mat_support(fr.residual)) CHECK(M.interior_contains(u));
    bool first_is_t1 = F0.contains(QVec{1, 0});
    const ElemWord& w0 = fr.word;
    REQUIRE(!w0.empty());
    if (first_is_t1) CHECK(w0[0] == ElemFactor{1, 2, el("-(2,0)")});
    else CHECK(w0[0] == ElemFactor{2, 1, el("(0,2)")});

    // already interior: nothing to do
    RingMatrix I = elementary(3, 1, 2, el("(3,1)")) * elementary(3, 2, 3, el("(1,1)"));
    FacetReduction fi = facet_reduce(I, M, sub);
    CHECK(fi.word.empty());
    CHECK(fi.residual == I);

    // constant matrices stay constant
    RingMatrix K = elementary(3, 1, 2, el("5")) * elementary(3, 3, 1, el("-2"));
    FacetReduction fk = facet_reduce(K, M, sub);
    for (const auto& u : mat_support(fk.residual)) CHECK(u.is_zero());
    CHECK(eval(fk.word, 3, 2) * fk.residual == K);
}

TEST_CASE("facet reduction on a rank-three cone keeps processed faces clean") {
    auto M = square_cone();
    DescentConfig cfg;
    SubFactorizer sub = [&](const RingMatrix& B, const AffineMonoid& MF) { return factorize(B, MF, cfg); };
    for (int t = 0; t < 5; ++t) {
        ElemWord w;
        const QMat gens = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {1, 1, 2}};
        for (int k = 0; k < 3; ++k) {
            int p = static_cast<int>(rand_int(1, 3)), q;
            do q = static_cast<int>(rand_int(1, 3));
            while (q == p);
            const QVec& g = gens[static_cast<size_t>(rand_int(0, 4))];
            std::vector<int64_t> e;
            for (const auto& x : g) e.push_back(x.get_num().get_si());
            w.push_back({p, q, RingElem::monomial(ExpVec(e, 0, 2), Rat(rand_int(1, 3)))});
        }
        RingMatrix A = word_eval(w, 3, 3, 2);
        FacetReduction fr = facet_reduce(A, M, sub);
        CHECK(word_eval(fr.word, 3, 3, 2) * fr.residual == mat_frobenius(A, fr.level));
        for (const auto& u : mat_support(fr.residual))
            if (!u.is_zero()) CHECK(M.cone().interior_contains(u));
    }
}

TEST_CASE("simplicial factorization") {
    auto Z2 = AffineMonoid::from_qmat({{1, 0}, {0, 1}}, 2);
    DescentConfig cfg;
    RingMatrix A = elementary(3, 1, 2, el("(1,1)")) * elementary(3, 2, 3, el("(2,1)")) * elementary(3, 3, 1, el("(1,2)"));
    auto cert = simplicial_factor(A, Z2, cfg);
    CHECK(verify_factorization(Z2, cert).ok);
    CHECK(cert.j_A >= 0);
    REQUIRE(!cert.provenance.empty());
    CHECK(cert.provenance[0].stage == "simplicial");

    auto id = simplicial_factor(RingMatrix::identity(3, 2, 2), Z2, cfg);
    CHECK(id.word.empty());
    CHECK(id.j_A == 0);

    RingMatrix E = elementary(3, 1, 2, el("(1,1)"));
    auto ce = simplicial_factor(E, Z2, cfg);
    REQUIRE(ce.word.size() == 1);
    CHECK(ce.word[0] == ElemFactor{1, 2, el("(1,1)")});

    CHECK_THROWS_AS(simplicial_factor(elementary(3, 1, 2, el("(1,0)")), Z2, cfg), PreconditionError);
    CHECK_THROWS_AS(simplicial_factor(A, square_cone(), cfg), PreconditionError);
}

TEST_CASE("pyramidal descent step on a segment") {
    // Phi(N) = [(1,0),(0,1)] on x1 + x2 = 1, Phi(L) = [(1/2,1/2),(0,1)]
    auto N = AffineMonoid::from_qmat({{1, 0}, {0, 1}}, 2);
    Hyperplane G{{1, 1}, 1};
    Polytope phiL = Polytope::from_points({{Rat(1, 2), Rat(1, 2)}, {0, 1}});
    DescentConfig cfg;

    RingMatrix A = elementary(3, 1, 2, el("(3,2)")) * elementary(3, 2, 3, el("(1,2)"));
    PyramidalStep ps = pyramidal_descent_step(A, N, G, phiL, cfg);
    CHECK(eval(ps.word, 3, 2) * ps.residual == A);
    CHECK(supported_over(ps.residual, G, phiL));
    // the residual avoids the cut-off region: no image in Delta_1 minus the base
    for (const auto& u : mat_support(ps.residual)) {
        if (u.is_zero()) continue;
        auto p = phi_image(u, G);
        CHECK(p->at(0) < Rat(1, 2));
    }
    for (const auto& x : ps.word)
        for (const auto& t : x.lambda.terms()) CHECK(N.hull_interior_contains(t.first));
    CHECK(ps.lambda > 0);
    CHECK(ps.lambda < 1);

    // already over L_*: nothing to do
    RingMatrix B = elementary(3, 1, 2, el("(1,3)"));
    PyramidalStep pb = pyramidal_descent_step(B, N, G, phiL, cfg);
    CHECK(pb.word.empty());
    CHECK(pb.residual == B);

    Polytope notpyr = Polytope::from_points({{Rat(1, 4), Rat(3, 4)}, {Rat(3, 4), Rat(1, 4)}});
    CHECK_THROWS_AS(pyramidal_descent_step(A, N, G, notpyr, cfg), PreconditionError);
}

TEST_CASE("factorize: base cases and round trips") {
    auto M = veronese();
    DescentConfig cfg;
    RingMatrix K = elementary(3, 1, 2, el("5")) * elementary(3, 2, 1, el("-1/5"));
    auto ck = factorize(K, M, cfg);
    CHECK(ck.j_A == 0);
    CHECK(verify_factorization(M, ck).ok);

    for (int t = 0; t < 10; ++t) {
        ElemWord w;
        const std::vector<std::string> mons = {"(2,0)", "(1,1)", "(0,2)", "(3,1)", "(2,2)", "1"};
        for (int k = 0; k < 3; ++k) {
            int p = static_cast<int>(rand_int(1, 3)), q;
            do q = static_cast<int>(rand_int(1, 3));
            while (q == p);
            w.push_back({p, q, el(mons[static_cast<size_t>(rand_int(0, 5))])});
        }
        RingMatrix A = eval(w, 3, 2);
        auto cert = factorize(A, M, cfg);
        CHECK(verify_factorization(M, cert).ok);
    }
    CHECK_THROWS_AS(factorize(cohn(2), M, cfg), PreconditionError);
    CHECK_THROWS_AS(factorize(elementary(3, 1, 2, el("(1,0)")), M, cfg), PreconditionError);
}

TEST_CASE("factorize: the stabilized Cohn matrix needs a Frobenius step") {
    auto M = veronese();
    auto cert = factorize(cohn(), M);
    CHECK(cert.j_A >= 1);
    CHECK(verify_factorization(M, cert).ok);
    CHECK(word_eval(cert.word, 3, 2, 2) == mat_frobenius(cohn(), cert.j_A));
    REQUIRE(!cert.provenance.empty());
    CHECK(cert.provenance.front().stage == "facet");
}

TEST_CASE("factorize: non-simplicial cone through pyramidal descent") {
    auto M = square_cone();
    RingMatrix E = elementary(3, 1, 2, parse_elem("(1,1,2)", 3, 2)) *
                   elementary(3, 2, 3, parse_elem("(1,1,3) + (1,2,3)", 3, 2));
    auto cert = factorize(E, M);
    CHECK(verify_factorization(M, cert).ok);
    bool pyramidal = false;
    for (const auto& p : cert.provenance)
        if (p.stage == "pyramidal") pyramidal = true;
    CHECK(pyramidal);
}

TEST_CASE("verify_factorization rejects corrupted certificates") {
    auto M = veronese();
    auto cert = factorize(cohn(), M);
    REQUIRE(verify_factorization(M, cert).ok);

    auto c1 = cert;
    c1.word[0].lambda = c1.word[0].lambda + el("(2,2)");
    auto r1 = verify_factorization(M, c1);
    CHECK_FALSE(r1.ok);
    CHECK(r1.failure.find("product identity") != std::string::npos);

    auto c2 = cert;
    c2.j_A = 0;
    CHECK_FALSE(verify_factorization(M, c2).ok);

    auto c3 = cert;
    c3.word.push_back({1, 2, el("(1,0)")});
    c3.word.push_back({1, 2, el("-(1,0)")});
    auto r3 = verify_factorization(M, c3);
    CHECK_FALSE(r3.ok);
    CHECK(r3.failure.find("lies in M") != std::string::npos);

    auto c4 = cert;
    c4.j_A = -1;
    CHECK_FALSE(verify_factorization(M, c4).ok);
}
