#include "mf/io.hpp"

#include <fstream>
#include <sstream>

namespace mf::io {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& what) { throw ParseError(what); }

const Json& member(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) bad(where + ": missing \"" + key + "\"");
    return j.at(key);
}

int get_int(const Json& j, const char* key, const std::string& where) {
    const Json& v = member(j, key, where);
    if (!v.is_number_integer()) bad(where + ": \"" + key + "\" must be an integer");
    return v.get<int>();
}

std::string get_string(const Json& j, const char* key, const std::string& where) {
    const Json& v = member(j, key, where);
    if (!v.is_string()) bad(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

// rationals are written as strings; plain integers are accepted on input
Rat get_rat(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return Rat(v.get<long>());
    if (v.is_string()) return parse_rat(v.get<std::string>());
    bad(where + ": expected a rational number");
}

Json matrix_header(const RingMatrix& A) {
    Json j;
    j["r"] = A.size();
    j["field"] = A.field().str();
    j["entries"] = entries_to_json(A);
    return j;
}

}  // namespace

Json read_json_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) bad("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        bad(p.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

void write_text_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
    if (!out) throw Error("write failed: " + p.string());
}

namespace {

bool is_flat(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& x : j)
        if (x.is_structured()) return false;
    return true;
}

void dump_rec(const Json& j, int indent, std::string& out) {
    std::string pad(static_cast<size_t>(indent + 2), ' ');
    if (j.is_object() && !j.empty()) {
        out += "{\n";
        size_t k = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++k) {
            out += pad + Json(it.key()).dump() + ": ";
            dump_rec(it.value(), indent + 2, out);
            out += k + 1 < j.size() ? ",\n" : "\n";
        }
        out += std::string(static_cast<size_t>(indent), ' ') + "}";
    } else if (j.is_array() && !j.empty() && !is_flat(j)) {
        out += "[\n";
        for (size_t k = 0; k < j.size(); ++k) {
            out += pad;
            dump_rec(j[k], indent + 2, out);
            out += k + 1 < j.size() ? ",\n" : "\n";
        }
        out += std::string(static_cast<size_t>(indent), ' ') + "]";
    } else if (j.is_array()) {
        out += "[";
        for (size_t k = 0; k < j.size(); ++k) out += (k ? ", " : "") + j[k].dump();
        out += "]";
    } else {
        out += j.dump();
    }
}

}  // namespace

std::string dump(const Json& j) {
    std::string out;
    dump_rec(j, 0, out);
    return out + "\n";
}

Json monoid_to_json(const AffineMonoid& M) {
    Json j;
    j["ambient_dim"] = M.ambient_dim();
    j["base"] = M.base();
    Json gens = Json::array();
    for (const auto& g : M.generators()) {
        Json row = Json::array();
        for (int i = 0; i < g.dim(); ++i) row.push_back(g.num(i));
        gens.push_back(row);
    }
    j["generators"] = gens;
    return j;
}

AffineMonoid monoid_from_json(const Json& j, int base_override) {
    const std::string where = "monoid";
    int n = get_int(j, "ambient_dim", where);
    int c = base_override > 0 ? base_override : get_int(j, "base", where);
    if (n < 1) bad(where + ": ambient_dim must be positive");
    if (c < 2) bad(where + ": base must be at least 2");
    const Json& g = member(j, "generators", where);
    if (!g.is_array()) bad(where + ": generators must be an array");
    QMat gens;
    for (size_t k = 0; k < g.size(); ++k) {
        const Json& row = g[k];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            bad(where + ": generator " + std::to_string(k) + " must have " + std::to_string(n) + " integer entries");
        QVec v;
        for (const auto& x : row) {
            if (!x.is_number_integer()) bad(where + ": generator " + std::to_string(k) + " has a non-integer entry");
            v.push_back(Rat(x.get<long>()));
        }
        gens.push_back(v);
    }
    if (gens.empty()) return AffineMonoid::trivial(n, c);
    return AffineMonoid::from_qmat(gens, c);
}

ElemFactor factor_from_json(const Json& j, int n, int c, Field f) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number_integer() || !j[1].is_number_integer() || !j[2].is_string())
        bad("word factor must be [p, q, \"element\"], got " + j.dump());
    return {j[0].get<int>(), j[1].get<int>(), parse_elem(j[2].get<std::string>(), n, c, f)};
}

Json word_to_json(const ElemWord& w) {
    Json out = Json::array();
    for (const auto& x : w) out.push_back(Json::array({x.p, x.q, x.lambda.str()}));
    return out;
}

ElemWord word_from_json(const Json& j, int n, int c, Field f) {
    if (!j.is_array()) bad("word must be an array");
    ElemWord w;
    for (size_t k = 0; k < j.size(); ++k) {
        try {
            w.push_back(factor_from_json(j[k], n, c, f));
        } catch (const ParseError& e) {
            bad("word factor " + std::to_string(k) + ": " + e.what());
        }
    }
    return w;
}

Json entries_to_json(const RingMatrix& A) {
    Json rows = Json::array();
    for (int i = 0; i < A.size(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < A.size(); ++k) row.push_back(A.at(i, k).str());
        rows.push_back(row);
    }
    return rows;
}

RingMatrix entries_from_json(const Json& j, int n, int c, Field f) {
    if (!j.is_array() || j.empty()) bad("entries must be a nonempty square array");
    int r = static_cast<int>(j.size());
    RingMatrix A(r, n, c, f);
    for (int i = 0; i < r; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != r)
            bad("entries: row " + std::to_string(i + 1) + " must have " + std::to_string(r) + " entries");
        for (int k = 0; k < r; ++k) {
            const Json& e = row[static_cast<size_t>(k)];
            if (e.is_number_integer()) {
                A.at(i, k) = RingElem::constant(n, c, Rat(e.get<long>()), f);
                continue;
            }
            std::string pos = "entries: (" + std::to_string(i + 1) + "," + std::to_string(k + 1) + ")";
            if (!e.is_string()) bad(pos + " must be a string");
            try {
                A.at(i, k) = parse_elem(e.get<std::string>(), n, c, f);
            } catch (const ParseError& err) {
                bad(pos + ": " + err.what());
            }
        }
    }
    return A;
}

AffineMonoid resolve_monoid(const Json& ref, const fs::path& base_dir, int base_override) {
    if (ref.is_string()) return monoid_from_json(read_json_file(base_dir / ref.get<std::string>()), base_override);
    return monoid_from_json(ref, base_override);
}

Field resolve_field(const Json& j, const std::optional<std::string>& field_flag, std::optional<long> mod_p) {
    if (mod_p) {
        if (field_flag && *field_flag == "Q") bad("--mod-p conflicts with --field Q");
        return parse_field("F" + std::to_string(*mod_p));
    }
    if (field_flag) {
        if (*field_flag == "Fp") bad("--field Fp needs --mod-p");
        return parse_field(*field_flag);
    }
    if (j.is_object() && j.contains("field")) return parse_field(get_string(j, "field", "fixture"));
    return Field{};
}

MatrixFixture load_matrix_fixture(const fs::path& p, const std::optional<std::string>& field_flag,
                                  std::optional<long> mod_p, int base_override) {
    Json j = read_json_file(p);
    MatrixFixture fx;
    fx.monoid = resolve_monoid(member(j, "monoid", p.string()), p.parent_path(), base_override);
    fx.field = resolve_field(j, field_flag, mod_p);
    fx.matrix = entries_from_json(member(j, "entries", p.string()), fx.monoid.ambient_dim(), fx.monoid.base(), fx.field);
    if (j.contains("r") && get_int(j, "r", p.string()) != fx.matrix.size())
        bad(p.string() + ": \"r\" does not match the entries");
    return fx;
}

OracleEntry load_oracle_fixture(const fs::path& p) {
    Json j = read_json_file(p);
    const std::string where = p.string();
    int n = get_int(j, "ambient_dim", where), c = get_int(j, "base", where);
    Field f = resolve_field(j, {}, {});
    OracleEntry e;
    e.name = get_string(j, "name", where);
    e.matrix = entries_from_json(member(j, "entries", where), n, c, f);
    e.word = word_from_json(member(j, "word", where), n, c, f);
    check_word(e.word, e.matrix.size());
    if (word_eval(e.word, e.matrix.size(), n, c, f) != e.matrix)
        throw VerificationError(where + ": oracle word does not multiply to the matrix");
    return e;
}

SeparationJob load_separation_job(const fs::path& p, const std::optional<std::string>& field_flag,
                                  std::optional<long> mod_p, int base_override, const std::optional<Rat>& eps_override) {
    Json j = read_json_file(p);
    const std::string where = p.string();
    SeparationJob job;
    job.monoid = resolve_monoid(member(j, "monoid", where), p.parent_path(), base_override);
    int n = job.monoid.ambient_dim(), c = job.monoid.base();
    job.field = resolve_field(j, field_flag, mod_p);
    job.cut = parse_hyperplane(get_string(j, "cut", where), n);
    if (j.contains("section")) {
        job.section = parse_hyperplane(get_string(j, "section", where), n);
    } else {
        job.section = Hyperplane{job.monoid.degree(), Rat(1)};
    }
    job.eps = eps_override ? *eps_override : get_rat(member(j, "epsilon", where), where + ": epsilon");
    if (job.eps <= 0) bad(where + ": epsilon must be positive");
    job.r = get_int(j, "r", where);
    job.word = word_from_json(member(j, "word", where), n, c, job.field);
    check_word(job.word, job.r);
    return job;
}

Json factorization_certificate_to_json(const AffineMonoid& M, const FactorizationCertificate& cert) {
    Json j;
    j["format"] = kCertificateFormat;
    j["version"] = kFormatVersion;
    j["kind"] = "factorization";
    j["monoid"] = monoid_to_json(M);
    j["target"] = matrix_header(cert.target);
    j["j_A"] = cert.j_A;
    j["word"] = word_to_json(cert.word);
    Json prov = Json::array();
    for (const auto& e : cert.provenance) {
        Json x;
        x["stage"] = e.stage;
        x["begin"] = e.begin;
        x["end"] = e.end;
        x["note"] = e.note;
        prov.push_back(x);
    }
    j["provenance"] = prov;
    return j;
}

Json separation_certificate_to_json(const SeparationProblem& P, const ElemWord& input,
                                    const SeparationCertificate& cert) {
    Json j;
    j["format"] = kCertificateFormat;
    j["version"] = kFormatVersion;
    j["kind"] = "separation";
    j["monoid"] = monoid_to_json(P.monoid());
    j["cut"] = P.cut().str();
    j["section"] = P.section().str();
    j["epsilon"] = to_string(P.eps());
    j["r"] = P.size();
    j["field"] = P.field().str();
    j["input"] = word_to_json(input);
    j["j_A"] = cert.j_A;
    j["A1"] = word_to_json(cert.A1);
    j["A2"] = entries_to_json(cert.A2);
    Json wit = Json::array();
    for (const auto& w : cert.witnesses) {
        Json x;
        x["u"] = w.u.str();
        x["side"] = w.side;
        x["dist2"] = to_string(w.dist2);
        wit.push_back(x);
    }
    j["witnesses"] = wit;
    Json stats;
    stats["frobenius"] = cert.frobenius;
    stats["iterations"] = cert.iterations;
    stats["com3_calls"] = cert.com3_calls;
    j["stats"] = stats;
    return j;
}

namespace {

CheckResult verify_factorization_doc(const Json& doc) {
    AffineMonoid M = monoid_from_json(member(doc, "monoid", "certificate"));
    int n = M.ambient_dim(), c = M.base();
    const Json& t = member(doc, "target", "certificate");
    Field f = resolve_field(t, {}, {});
    FactorizationCertificate cert;
    cert.target = entries_from_json(member(t, "entries", "target"), n, c, f);
    if (get_int(t, "r", "target") != cert.target.size()) return {false, "target size r does not match the entries"};
    cert.j_A = get_int(doc, "j_A", "certificate");
    cert.word = word_from_json(member(doc, "word", "certificate"), n, c, f);
    return verify_factorization(M, cert);
}

CheckResult verify_separation_doc(const Json& doc) {
    AffineMonoid M = monoid_from_json(member(doc, "monoid", "certificate"));
    int n = M.ambient_dim(), c = M.base();
    Field f = resolve_field(doc, {}, {});
    Hyperplane H = parse_hyperplane(get_string(doc, "cut", "certificate"), n);
    Hyperplane G = parse_hyperplane(get_string(doc, "section", "certificate"), n);
    Rat eps = get_rat(member(doc, "epsilon", "certificate"), "epsilon");
    int r = get_int(doc, "r", "certificate");
    SeparationProblem P(M, H, G, eps, r, f);
    ElemWord input = word_from_json(member(doc, "input", "certificate"), n, c, f);
    SeparationCertificate cert;
    cert.j_A = get_int(doc, "j_A", "certificate");
    cert.A1 = word_from_json(member(doc, "A1", "certificate"), n, c, f);
    cert.A2 = entries_from_json(member(doc, "A2", "certificate"), n, c, f);
    const Json& wit = member(doc, "witnesses", "certificate");
    if (!wit.is_array()) bad("witnesses must be an array");
    for (const auto& w : wit)
        cert.witnesses.push_back({parse_expvec(get_string(w, "u", "witness"), c), get_int(w, "side", "witness"),
                                  get_rat(member(w, "dist2", "witness"), "witness dist2")});
    return verify_separation(P, input, cert);
}

}  // namespace

CheckResult verify_certificate(const Json& doc) {
    try {
        if (!doc.is_object()) return {false, "certificate header: not an object"};
        if (doc.value("format", std::string()) != kCertificateFormat)
            return {false, "certificate header: format is not " + std::string(kCertificateFormat)};
        if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"].get<int>() != kFormatVersion)
            return {false, "certificate header: unsupported version"};
        std::string kind = doc.value("kind", std::string());
        if (kind == "factorization") return verify_factorization_doc(doc);
        if (kind == "separation") return verify_separation_doc(doc);
        return {false, "certificate header: unknown kind '" + kind + "'"};
    } catch (const Error& e) {
        return {false, std::string("certificate is malformed: ") + e.what()};
    }
}

}  // namespace mf::io
