// mfact: factorize matrices over monoid rings, run almost separation, and
// check certificates.
//
//   mfact factorize --input cohn.json --output cohn.cert.json
//   mfact separate --input job.json --output job.cert.json
//   mfact verify --input cohn.cert.json
//   mfact polyhedra-info --input square.json
//
// Exit codes: 0 success, 2 bad input, 3 budget exhausted, 4 verification failure.

#include "mf/io.hpp"

#include <chrono>
#include <iostream>

#include "CLI11.hpp"

using namespace mf;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string input;
    std::string output;
    std::optional<std::string> field;
    std::optional<long> mod_p;
    int base_c = 0;
    std::optional<std::string> epsilon;
    std::vector<std::string> oracles;
    bool verify_only = false;
    bool verbose = false;
    int budget_frobenius = 16;
    int budget_heuristic = 2000;
    int budget_iterations = 100000;
    int budget_com = 10000;
    int budget_lambda = 10;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_budgets(const Options& o) {
    std::cout << "budgets: frobenius " << o.budget_frobenius << ", heuristic " << o.budget_heuristic
              << ", iterations " << o.budget_iterations << ", com " << o.budget_com << ", lambda steps "
              << o.budget_lambda << "\n";
}

void write_output(const Options& o, const io::Json& doc) {
    std::string text = io::dump(doc);
    if (o.output.empty() || o.output == "-") {
        std::cout << text;
    } else {
        io::write_text_file(o.output, text);
        std::cout << "certificate: " << o.output << "\n";
    }
}

int verify_file(const std::string& path) {
    io::Json doc = io::read_json_file(path);
    CheckResult res = io::verify_certificate(doc);
    if (res.ok) {
        std::cout << "verify: PASS (" << doc.value("kind", std::string("?")) << " certificate " << path << ")\n";
        return 0;
    }
    std::cout << "verify: FAIL: " << res.failure << "\n";
    return 4;
}

SeparationConfig separation_config(const Options& o) {
    SeparationConfig cfg;
    cfg.max_frobenius = o.budget_frobenius;
    cfg.main_iterations = o.budget_iterations;
    cfg.com_iterations = o.budget_com;
    if (o.verbose) cfg.log = [](const std::string& s) { std::cerr << "  " << s << "\n"; };
    return cfg;
}

int run_factorize(const Options& o) {
    if (o.verify_only) return verify_file(o.input);
    auto t0 = std::chrono::steady_clock::now();
    io::MatrixFixture fx = io::load_matrix_fixture(o.input, o.field, o.mod_p, o.base_c);
    DescentConfig cfg;
    cfg.max_frobenius = o.budget_frobenius;
    cfg.heuristic_budget = o.budget_heuristic;
    cfg.lambda_steps = o.budget_lambda;
    cfg.factorizers = {univariate_factorizer(), heuristic_factorizer(o.budget_heuristic)};
    if (!o.oracles.empty()) {
        std::vector<OracleEntry> entries;
        for (const auto& p : o.oracles) entries.push_back(io::load_oracle_fixture(p));
        cfg.factorizers.push_back(oracle_factorizer(entries, o.budget_heuristic));
    }
    cfg.separation = separation_config(o);
    if (o.verbose) cfg.log = [](const std::string& s) { std::cerr << s << "\n"; };

    FactorizationCertificate cert = factorize(fx.matrix, fx.monoid, cfg);
    CheckResult chk = verify_factorization(fx.monoid, cert);
    if (!chk.ok) throw VerificationError(chk.failure);

    std::cout << "factorize: " << o.input << "\n";
    std::cout << "monoid: " << fx.monoid.str() << ", field " << fx.field.str() << ", r = " << fx.matrix.size() << "\n";
    std::cout << "j_A = " << cert.j_A << ", word length " << cert.word.size() << "\n";
    for (const auto& e : cert.provenance)
        std::cout << "  stage " << e.stage << ": factors [" << e.begin << ", " << e.end << ")"
                  << (e.note.empty() ? "" : " " + e.note) << "\n";
    print_budgets(o);
    std::cout << "time: " << seconds_since(t0) << " s\n";
    write_output(o, io::factorization_certificate_to_json(fx.monoid, cert));
    return 0;
}

int run_separate(const Options& o) {
    if (o.verify_only) return verify_file(o.input);
    auto t0 = std::chrono::steady_clock::now();
    std::optional<Rat> eps;
    if (o.epsilon) eps = parse_rat(*o.epsilon);
    io::SeparationJob job = io::load_separation_job(o.input, o.field, o.mod_p, o.base_c, eps);
    SeparationProblem P(job.monoid, job.cut, job.section, job.eps, job.r, job.field);
    SeparationCertificate cert = almost_separate(P, job.word, separation_config(o));
    CheckResult chk = verify_separation(P, job.word, cert);
    if (!chk.ok) throw VerificationError(chk.failure);

    std::cout << "separate: " << o.input << "\n";
    std::cout << "cut " << job.cut.str() << ", section " << job.section.str() << ", eps " << to_string(job.eps)
              << ", r = " << job.r << "\n";
    std::cout << "j_A = " << cert.j_A << ", A1 length " << cert.A1.size() << ", A2 support "
              << mat_support(cert.A2).size() << " monomials\n";
    std::cout << "iterations " << cert.iterations << ", com3 calls " << cert.com3_calls << "\n";
    print_budgets(o);
    std::cout << "time: " << seconds_since(t0) << " s\n";
    write_output(o, io::separation_certificate_to_json(P, job.word, cert));
    return 0;
}

int run_polyhedra_info(const Options& o) {
    io::Json j = io::read_json_file(o.input);
    Polytope P;
    if (j.contains("points")) {
        QMat pts;
        for (const auto& row : j["points"]) {
            QVec v;
            for (const auto& x : row) v.push_back(x.is_string() ? parse_rat(x.get<std::string>()) : Rat(x.get<long>()));
            pts.push_back(v);
        }
        if (pts.empty()) throw PreconditionError(o.input + ": no points");
        P = Polytope::from_points(pts);
    } else {
        AffineMonoid M = io::monoid_from_json(j, o.base_c);
        Hyperplane G{M.degree(), Rat(1)};
        P = cross_section(M.cone(), G);
        std::cout << "cross-section of " << M.str() << " on " << G.str() << "\n";
    }
    std::cout << "dimension " << P.dim() << ", vertices " << P.vertices().size() << ", facets "
              << P.inequalities().size() << "\n";
    for (const auto& v : P.vertices()) std::cout << "  vertex " << to_string(v) << "\n";
    auto pyr = is_pyramid(P);
    std::cout << "pyramid: " << (pyr ? "yes, apex " + to_string(pyr->apex) : std::string("no")) << "\n";
    ComplexityResult cr = complexity(P);
    std::cout << "complexity " << cr.complexity << "\n";
    for (size_t i = 0; i < cr.chain.size(); ++i)
        std::cout << "  chain " << i << ": dimension " << cr.chain[i].dim() << ", " << cr.chain[i].vertices().size()
                  << " vertices\n";
    return 0;
}

void add_common(CLI::App* sub, Options& o, bool with_output) {
    sub->add_option("--input,-i", o.input, "input fixture or certificate")->required()->check(CLI::ExistingFile);
    if (with_output) sub->add_option("--output,-o", o.output, "certificate path ('-' for stdout)");
    sub->add_option("--base-c", o.base_c, "override the base c of the monoid")->check(CLI::Range(2, 1 << 20));
    sub->add_flag("--verbose,-v", o.verbose, "progress messages on stderr");
}

void add_field(CLI::App* sub, Options& o) {
    sub->add_option("--field", o.field, "coefficient field: Q, F<p>, or Fp with --mod-p");
    sub->add_option("--mod-p", o.mod_p, "prime characteristic")->check(CLI::PositiveNumber);
}

void add_budgets(CLI::App* sub, Options& o) {
    sub->add_option("--budget-frobenius", o.budget_frobenius, "largest Frobenius level tried")
        ->check(CLI::PositiveNumber);
    sub->add_option("--budget-iterations", o.budget_iterations, "main-loop iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--budget-com", o.budget_com, "commuting-rule iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--budget-heuristic", o.budget_heuristic, "elimination step cap of the base case")
        ->check(CLI::PositiveNumber);
    sub->add_option("--budget-lambda", o.budget_lambda, "shrink factors tried per pyramidal step")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--verify-only", o.verify_only, "treat --input as a certificate and only verify it");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mfact: certified elementary factorizations over monoid rings"};
    app.require_subcommand(1);
    Options o;

    auto* fac = app.add_subcommand("factorize", "factor a matrix fixture into elementary matrices");
    add_common(fac, o, true);
    add_field(fac, o);
    add_budgets(fac, o);
    fac->add_option("--oracle", o.oracles, "oracle fixture(s) with known base words")->check(CLI::ExistingFile);

    auto* sep = app.add_subcommand("separate", "almost separation of an elementary word along a cut");
    add_common(sep, o, true);
    add_field(sep, o);
    add_budgets(sep, o);
    sep->add_option("--epsilon", o.epsilon, "override epsilon (rational)");

    auto* ver = app.add_subcommand("verify", "re-check a certificate file");
    add_common(ver, o, false);

    auto* info = app.add_subcommand("polyhedra-info", "vertices, pyramid test and complexity of a polytope");
    add_common(info, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (o.mod_p && !o.field) o.field = "F" + std::to_string(*o.mod_p);
        if (o.field && *o.field == "Fp" && o.mod_p) o.field = "F" + std::to_string(*o.mod_p);
        if (o.mod_p && o.field && *o.field != "F" + std::to_string(*o.mod_p))
            throw PreconditionError("--mod-p " + std::to_string(*o.mod_p) + " conflicts with --field " + *o.field);
        if (*fac) return run_factorize(o);
        if (*sep) return run_separate(o);
        if (*ver) return verify_file(o.input);
        if (*info) return run_polyhedra_info(o);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return 3;
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 4;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
