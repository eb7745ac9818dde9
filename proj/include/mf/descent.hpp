#pragma once
// Factorization drivers: polynomial base cases, facet reduction, simplicial
// factorization through free covers, pyramidal descent steps and the end-to-end
// driver producing certified elementary words.

#include "mf/separation.hpp"

namespace mf {

// ---------------------------------------------------------------------------
// Polynomial matrices: exponents integral and nonnegative.

bool is_polynomial(const RingElem& g);
bool is_polynomial_matrix(const RingMatrix& A);
// coordinates that occur with a positive exponent somewhere in A
std::vector<int> used_variables(const RingMatrix& A);

// Division by the leading term of b in the graded order, repeated until no
// term of the remainder is divisible by it: a = q b + rem.
std::pair<RingElem, RingElem> lead_divmod(const RingElem& a, const RingElem& b);

// Elimination over k[t]: column Euclid to the identity. Throws
// PreconditionError when det(A) != 1 or A involves more than one variable.
ElemWord base_factor_univariate(const RingMatrix& A);

// Row and column elimination with unit pivots and degree-decreasing division
// steps, no stabilization tricks. Works for any r >= 2; nullopt when stuck.
std::optional<ElemWord> eliminate(const RingMatrix& A, int budget = 2000);

// eliminate plus the rank-one commutator trick: when the stuck matrix is
// 1 + v w^T with w.v = 0 and an index where v and w both vanish, it is the
// commutator [1 + v e_m^T, 1 + e_m w^T]. Needs r >= 3; nullopt on failure.
std::optional<ElemWord> base_factor_multivariate_heuristic(const RingMatrix& A, int budget = 2000);

// Pluggable base-case strategy over polynomial rings. A returned word is
// always re-multiplied by the caller before use.
struct BaseFactorizer {
    std::string id;
    std::function<bool(const RingMatrix&)> applies;
    std::function<std::optional<ElemWord>(const RingMatrix&)> factor;
};
BaseFactorizer univariate_factorizer();
BaseFactorizer heuristic_factorizer(int budget = 2000);
// Known (matrix, word) pairs. Every pair is checked by multiplication at
// construction (VerificationError otherwise). A query B is answered when
// B equals a stored matrix or when B B0^{-1} or B0^{-1} B yields to the heuristic.
struct OracleEntry {
    std::string name;
    RingMatrix matrix;
    ElemWord word;
};
BaseFactorizer oracle_factorizer(std::vector<OracleEntry> entries, int budget = 2000);
std::vector<BaseFactorizer> default_factorizers();

// ---------------------------------------------------------------------------
// Certificates

struct ProvenanceEntry {
    std::string stage;   // "facet", "simplicial", "sandwich", "pyramidal", "field"
    size_t begin = 0;    // word positions [begin, end)
    size_t end = 0;
    std::string note;
};

struct FactorizationCertificate {
    int j_A = 0;
    ElemWord word;       // factors over k[M]; word_eval(word) = frobenius(target, j_A)
    RingMatrix target;
    std::vector<ProvenanceEntry> provenance;
};

// product identity, determinant, nonnegative j_A and membership of every factor monomial in M
CheckResult verify_factorization(const AffineMonoid& M, const FactorizationCertificate& cert);

struct DescentConfig {
    int max_frobenius = 16;   // largest Frobenius level tried when landing factors in M
    int heuristic_budget = 2000;
    int lambda_steps = 10;    // lambda = 1 - 2^{-t}, t = 1..lambda_steps
    int eps_steps = 20;       // eps = 2^{-s}, s = 1..eps_steps
    std::vector<BaseFactorizer> factorizers = default_factorizers();
    SeparationConfig separation;
    std::function<void(const std::string&)> log;
};

// least j >= 0 with c^j u in M for every factor monomial u; BudgetExceeded beyond max_j
int landing_level(const AffineMonoid& M, const ElemWord& w, int max_j);

// ---------------------------------------------------------------------------
// Transport along a free submonoid

// A matrix whose monomials are nonnegative integer combinations of basis,
// rewritten over k[t_1..t_k] (k = basis size). Throws PreconditionError otherwise.
RingMatrix transport_to_polynomial(const RingMatrix& A, const std::vector<ExpVec>& basis);
// t^a -> sum a_i basis_i
ElemWord pull_back(const ElemWord& w, const std::vector<ExpVec>& basis);

// ---------------------------------------------------------------------------
// Facet reduction

struct FacetStep {
    Cone face;
    int frobenius = 0;     // level added by this step
    size_t word_length = 0;
};
struct FacetReduction {
    ElemWord word;          // over k[M]
    RingMatrix residual;    // word_eval(word) * residual = frobenius(A, level)
    int level = 0;
    std::vector<FacetStep> steps;
};
using SubFactorizer = std::function<FactorizationCertificate(const RingMatrix&, const AffineMonoid&)>;

// Peels the retractions onto the facets of the cone one by one. Throws Error
// naming the facet when the sub-factorizer fails.
FacetReduction facet_reduce(const RingMatrix& A, const AffineMonoid& M, const SubFactorizer& sub);
// no nonzero support monomial of R lies in any of the faces
bool processed_face_exclusion(const RingMatrix& R, const std::vector<Cone>& faces);

// ---------------------------------------------------------------------------
// Simplicial factorization

// A over k[(M_*)^{c^{-j}}] with M simplicial. Transports along a free cover of
// the support, calls the base factorizers and pulls back. When require_interior
// is false and the free-cover route fails, also tries the free monoid spanned by
// c-power fractions of the extreme generators (factors may then touch facets).
FactorizationCertificate simplicial_factor(const RingMatrix& A, const AffineMonoid& M, const DescentConfig& cfg,
                                           bool require_interior = true);

// ---------------------------------------------------------------------------
// Pyramidal descent

struct PyramidalStep {
    ElemWord word;          // over (N_*)^{c^{-inf}}
    RingMatrix residual;    // over (L_*)^{c^{-inf}}; word_eval(word) * residual = A
    Rat lambda = 0, eps = 0;
    Polytope delta1, delta2;
    int separation_iterations = 0;
};

// Phi(L) subset Phi(N) a pyramidal extension of cross-sections on G (N full
// rank and normal, r >= 3). Desk scale: the pyramid Delta_2 must be a simplex.
PyramidalStep pyramidal_descent_step(const RingMatrix& A, const AffineMonoid& N, const Hyperplane& G,
                                     const Polytope& phiL, const DescentConfig& cfg);
// every nonzero support monomial has its cross-section image in the interior of phiL
bool supported_over(const RingMatrix& A, const Hyperplane& G, const Polytope& phiL);

// ---------------------------------------------------------------------------
// End-to-end driver

FactorizationCertificate factorize(const RingMatrix& A, const AffineMonoid& M, const DescentConfig& cfg = {});

}  // namespace mf
