#pragma once
// Fixture and certificate files. Everything is JSON text with keys in a fixed
// order, element literals as produced by RingElem::str, and exponent vectors
// as "(a,b)/c^j" strings, so equal inputs serialize to identical bytes.

#include "mf/descent.hpp"

#include <filesystem>

#include "json.hpp"

namespace mf::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCertificateFormat = "mfact-certificate";
inline constexpr int kFormatVersion = 1;

// ParseError carrying the file name and the byte offset of a syntax error
Json read_json_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& text);
// two-space indentation, arrays of scalars on one line, trailing newline
std::string dump(const Json& j);

// {"ambient_dim": n, "base": c, "generators": [[ints]]}; base_override > 0 replaces c
Json monoid_to_json(const AffineMonoid& M);
AffineMonoid monoid_from_json(const Json& j, int base_override = 0);

ElemFactor factor_from_json(const Json& j, int n, int c, Field f);
Json word_to_json(const ElemWord& w);
// [[p, q, "element literal"], ...]
ElemWord word_from_json(const Json& j, int n, int c, Field f);

// entries as an r x r array of element literals
Json entries_to_json(const RingMatrix& A);
RingMatrix entries_from_json(const Json& j, int n, int c, Field f);

// Resolves a "monoid" member: an inline object or a path relative to base_dir.
AffineMonoid resolve_monoid(const Json& ref, const std::filesystem::path& base_dir, int base_override = 0);

// Field selection: "Q", "F7", or {"field": "Fp", "mod_p": 7}-style overrides from the CLI.
Field resolve_field(const Json& j, const std::optional<std::string>& field_flag, std::optional<long> mod_p);

// Matrix fixture: {"monoid": ref, "field": "Q", "r": 3, "entries": [[...]]}.
struct MatrixFixture {
    AffineMonoid monoid;
    RingMatrix matrix;
    Field field;
};
MatrixFixture load_matrix_fixture(const std::filesystem::path& p, const std::optional<std::string>& field_flag = {},
                                  std::optional<long> mod_p = {}, int base_override = 0);

// Oracle fixture: {"name": s, "ambient_dim": n, "base": c, "field": f, "r": r,
// "entries": [[...]], "word": [...]}, the pair being checked on load.
OracleEntry load_oracle_fixture(const std::filesystem::path& p);

// Separation job: {"monoid": ref, "cut": "-x1+x2=0", "section": "x1+x2=1",
// "epsilon": "1/2", "r": 3, "field": "Q", "word": [...]}. Without "section"
// the cross-section is deg.x = 1.
struct SeparationJob {
    AffineMonoid monoid;
    Hyperplane cut, section;
    Rat eps;
    int r = 3;
    Field field;
    ElemWord word;
};
SeparationJob load_separation_job(const std::filesystem::path& p, const std::optional<std::string>& field_flag = {},
                                  std::optional<long> mod_p = {}, int base_override = 0,
                                  const std::optional<Rat>& eps_override = {});

// Certificates carry {"format", "version", "kind"} first and are self-contained.
Json factorization_certificate_to_json(const AffineMonoid& M, const FactorizationCertificate& cert);
Json separation_certificate_to_json(const SeparationProblem& P, const ElemWord& input,
                                    const SeparationCertificate& cert);

// Re-checks a certificate document using nothing but its own contents.
// Malformed documents fail with the parse problem as the named invariant.
CheckResult verify_certificate(const Json& doc);

}  // namespace mf::io
