#include "doctest.h"
#include "helpers.hpp"

#include "mf/io.hpp"

#include <filesystem>

using namespace mf;
using namespace mf::io;

namespace {

const std::filesystem::path kFixtures = MF_FIXTURES;

std::filesystem::path scratch_dir() {
    auto p = std::filesystem::temp_directory_path() / "mf_test_io";
    std::filesystem::create_directories(p);
    return p;
}

RingElem el(const std::string& s) { return parse_elem(s, 2, 2); }

}  // namespace

TEST_CASE("monoid fixtures round-trip") {
    AffineMonoid M = monoid_from_json(read_json_file(kFixtures / "veronese.json"));
    CHECK(M.ambient_dim() == 2);
    CHECK(M.base() == 2);
    CHECK(M.contains(ExpVec({1, 1}, 0, 2)));
    CHECK_FALSE(M.contains(ExpVec({1, 0}, 0, 2)));
    Json j = monoid_to_json(M);
    CHECK(monoid_to_json(monoid_from_json(j)) == j);
    CHECK(monoid_from_json(j, 3).base() == 3);

    CHECK_THROWS_AS(monoid_from_json(Json::parse(R"({"ambient_dim": 2, "base": 2})")), ParseError);
    CHECK_THROWS_AS(monoid_from_json(Json::parse(R"({"ambient_dim": 2, "base": 2, "generators": [[1]]})")),
                    ParseError);
    CHECK_THROWS_AS(monoid_from_json(Json::parse(R"({"ambient_dim": 2, "base": 1, "generators": [[1,0]]})")),
                    ParseError);
}

TEST_CASE("words round-trip bit-exactly") {
    for (Field f : {Field{}, Field{11}}) {
        for (int t = 0; t < 30; ++t) {
            ElemWord w;
            int len = static_cast<int>(testutil::rand_int(0, 6));
            for (int k = 0; k < len; ++k) {
                int p = static_cast<int>(testutil::rand_int(1, 4)), q;
                do q = static_cast<int>(testutil::rand_int(1, 4));
                while (q == p);
                w.push_back({p, q, testutil::rand_elem(2, 2, 3, 5, 3, f)});
            }
            Json j = word_to_json(w);
            ElemWord back = word_from_json(j, 2, 2, f);
            CHECK(back == w);
            CHECK(word_to_json(back).dump() == j.dump());
        }
    }
    CHECK_THROWS_AS(word_from_json(Json::parse(R"([[1, 2]])"), 2, 2, {}), ParseError);
    CHECK_THROWS_AS(word_from_json(Json::parse(R"([[1, 2, "(1,"]])"), 2, 2, {}), ParseError);
}

TEST_CASE("matrix fixtures") {
    MatrixFixture fx = load_matrix_fixture(kFixtures / "cohn.json");
    CHECK(fx.matrix.size() == 3);
    CHECK(fx.matrix.at(0, 1) == el("-(2,0)"));
    CHECK(is_SL(fx.matrix));
    CHECK(entries_from_json(entries_to_json(fx.matrix), 2, 2, {}) == fx.matrix);

    MatrixFixture fp = load_matrix_fixture(kFixtures / "cohn.json", std::string("F5"));
    CHECK(fp.field == Field{5});
    CHECK(load_matrix_fixture(kFixtures / "cohn.json", {}, 7L).field == Field{7});
    CHECK_THROWS_AS(load_matrix_fixture(kFixtures / "cohn.json", std::string("Fp")), ParseError);
    CHECK_THROWS_AS(load_matrix_fixture(kFixtures / "cohn.json", std::string("F6")), ParseError);

    auto bad = scratch_dir() / "bad.json";
    write_text_file(bad, "{\"monoid\": \"veronese.json\", \"entries\": [[\"1\", ]]}");
    try {
        read_json_file(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("oracle fixture is checked on load") {
    OracleEntry e = load_oracle_fixture(kFixtures / "cohn_oracle.json");
    CHECK(e.word.size() == 8);
    CHECK(e.matrix == load_matrix_fixture(kFixtures / "cohn.json").matrix);

    Json j = read_json_file(kFixtures / "cohn_oracle.json");
    j["word"][0][2] = "(2,0)";
    auto p = scratch_dir() / "bad_oracle.json";
    write_text_file(p, dump(j));
    CHECK_THROWS_AS(load_oracle_fixture(p), VerificationError);
}

TEST_CASE("factorization certificates: deterministic and self-verifying") {
    MatrixFixture fx = load_matrix_fixture(kFixtures / "cohn.json");
    auto cert = factorize(fx.matrix, fx.monoid);
    Json doc = factorization_certificate_to_json(fx.monoid, cert);
    CHECK(doc.begin().key() == "format");
    CHECK(doc["version"] == kFormatVersion);
    CHECK(verify_certificate(doc).ok);

    auto again = factorize(fx.matrix, fx.monoid);
    CHECK(dump(factorization_certificate_to_json(fx.monoid, again)) == dump(doc));

    // survives a trip through a file
    auto p = scratch_dir() / "cohn.cert.json";
    write_text_file(p, dump(doc));
    CHECK(verify_certificate(read_json_file(p)).ok);

    Json t1 = doc;
    std::string lit = t1["word"][0][2].get<std::string>();
    t1["word"][0][2] = lit + " + (2,2)";
    auto r1 = verify_certificate(t1);
    CHECK_FALSE(r1.ok);
    CHECK_MESSAGE(r1.failure.find("product identity") != std::string::npos, r1.failure);

    Json t2 = doc;
    t2["version"] = kFormatVersion + 1;
    CHECK(verify_certificate(t2).failure.find("version") != std::string::npos);

    Json t3 = doc;
    t3["target"]["entries"][0][0] = "(1,";
    CHECK(verify_certificate(t3).failure.find("malformed") != std::string::npos);

    Json t4 = doc;
    t4.erase("word");
    CHECK_FALSE(verify_certificate(t4).ok);
}

TEST_CASE("separation jobs and certificates") {
    SeparationJob job = load_separation_job(kFixtures / "veronese_separation.json");
    CHECK(job.r == 3);
    CHECK(job.eps == Rat(1, 2));
    CHECK(job.word.size() == 4);
    SeparationProblem P(job.monoid, job.cut, job.section, job.eps, job.r, job.field);
    auto cert = almost_separate(P, job.word);
    Json doc = separation_certificate_to_json(P, job.word, cert);
    CHECK(verify_certificate(doc).ok);

    auto again = almost_separate(P, job.word);
    CHECK(dump(separation_certificate_to_json(P, job.word, again)) == dump(doc));

    Json t = doc;
    t["input"][0][2] = "2*(3,1)";
    CHECK_FALSE(verify_certificate(t).ok);

    Json w = doc;
    if (!w["witnesses"].empty()) {
        w["witnesses"][0]["dist2"] = "12345";
        CHECK_FALSE(verify_certificate(w).ok);
    }

    auto override_eps = load_separation_job(kFixtures / "veronese_separation.json", {}, {}, 0, Rat(1, 4));
    CHECK(override_eps.eps == Rat(1, 4));
}
