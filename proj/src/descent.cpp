#include "mf/descent.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mf {

namespace {

bool divides(const ExpVec& d, const ExpVec& u) {
    for (int i = 0; i < u.dim(); ++i)
        if (u.num(i) < d.num(i)) return false;
    return true;
}

int64_t total_degree(const ExpVec& u) {
    int64_t s = 0;
    for (int i = 0; i < u.dim(); ++i) s = checked_add(s, u.num(i));
    return s;
}

bool is_unit(const RingElem& g) {
    return !g.is_zero() && g.is_constant();
}

Rat const_value(const RingElem& g) {
    return g.is_zero() ? Rat(0) : g.terms()[0].second;
}

RingElem konst(const RingMatrix& A, const Rat& a) {
    return RingElem::constant(A.dim(), A.base(), a, A.field());
}

ElemFactor inverse_factor(const ElemFactor& x) {
    return {x.p, x.q, -x.lambda};
}

// Records cur = (left ops) * A * (right ops); 0-based row and column indices.
class Elimination {
public:
    explicit Elimination(const RingMatrix& A) : cur(A), r(A.size()) {}

    RingMatrix cur;
    int r;

    // row p += lam row q
    void row_add(int p, int q, const RingElem& lam) {
        if (lam.is_zero()) return;
        left_mul_elementary(cur, p + 1, q + 1, lam);
        left_.push_back({p + 1, q + 1, lam});
    }
    // column q += lam column p
    void col_add(int p, int q, const RingElem& lam) {
        if (lam.is_zero()) return;
        right_mul_elementary(cur, p + 1, q + 1, lam);
        right_.push_back({p + 1, q + 1, lam});
    }

    // word for the input, given a word for the current matrix
    ElemWord word(const ElemWord& middle = {}) const {
        ElemWord w;
        for (const auto& x : left_) w.push_back(inverse_factor(x));
        w.insert(w.end(), middle.begin(), middle.end());
        for (auto it = right_.rbegin(); it != right_.rend(); ++it) w.push_back(inverse_factor(*it));
        return w;
    }

    // unit u at (i, j) with i, j >= k: move it to (k, k) with 1 there, then
    // clear row and column k
    void pivot(int k, int i, int j) {
        Field f = cur.field();
        Rat u = const_value(cur.at(i, j));
        Rat uinv = f.inv(u);
        if (j != k) {
            col_add(j, k, cur.at(i, k).scaled(f.neg(uinv)));
            col_add(j, k, konst(cur, 1));
        }
        for (int t = k; t < r; ++t)
            if (t != i && !cur.at(t, k).is_zero()) row_add(t, i, cur.at(t, k).scaled(f.neg(uinv)));
        if (i != k) {
            // (k, k) is zero now
            row_add(k, i, konst(cur, uinv));
            row_add(i, k, konst(cur, f.neg(u)));
        } else if (u != 1) {
            if (k + 1 >= r) throw PreconditionError("determinant is not 1");
            int m = k + 1;
            Rat a = f.mul(f.add(Rat(1), f.neg(u)), uinv);  // (1 - u) / u
            row_add(m, k, konst(cur, a));
            row_add(k, m, konst(cur, 1));
            row_add(m, k, konst(cur, f.neg(f.add(Rat(1), f.neg(u)))));
        }
        for (int t = k + 1; t < r; ++t)
            if (!cur.at(k, t).is_zero()) col_add(k, t, -cur.at(k, t));
    }

    std::optional<std::pair<int, int>> find_unit(int k) const {
        for (int j = k; j < r; ++j)
            for (int i = k; i < r; ++i)
                if (is_unit(cur.at(i, j))) return std::make_pair(i, j);
        return std::nullopt;
    }

    // one lead-divisible reduction inside column k (rows) or row k (columns)
    bool lead_step(int k) {
        for (int i = k; i < r; ++i) {
            if (cur.at(i, k).is_zero()) continue;
            const ExpVec& li = cur.at(i, k).terms().back().first;
            for (int t = k; t < r; ++t) {
                if (t == i || cur.at(t, k).is_zero()) continue;
                if (!divides(li, cur.at(t, k).terms().back().first)) continue;
                auto [q, rem] = lead_divmod(cur.at(t, k), cur.at(i, k));
                row_add(t, i, -q);
                return true;
            }
        }
        for (int j = k; j < r; ++j) {
            if (cur.at(k, j).is_zero()) continue;
            const ExpVec& lj = cur.at(k, j).terms().back().first;
            for (int t = k; t < r; ++t) {
                if (t == j || cur.at(k, t).is_zero()) continue;
                if (!divides(lj, cur.at(k, t).terms().back().first)) continue;
                auto [q, rem] = lead_divmod(cur.at(k, t), cur.at(k, j));
                col_add(j, t, -q);
                return true;
            }
        }
        return false;
    }

    // an operation anywhere in the active block lowering the potential
    bool potential_step(int k) {
        auto pot = [](const RingElem& g) {
            int64_t s = 0;
            for (const auto& t : g.terms()) s += 1 + total_degree(t.first);
            return s;
        };
        int64_t best = 0;
        int kind = -1, bp = 0, bq = 0;
        RingElem bl;
        for (int j = k; j < r; ++j)
            for (int i = k; i < r; ++i) {
                if (cur.at(i, j).is_zero()) continue;
                for (int t = k; t < r; ++t) {
                    if (t == i || cur.at(t, j).is_zero()) continue;
                    auto q = lead_divmod(cur.at(t, j), cur.at(i, j)).first;
                    if (q.is_zero()) continue;
                    int64_t d = 0;
                    for (int s = k; s < r; ++s) d += pot(cur.at(t, s) - q * cur.at(i, s)) - pot(cur.at(t, s));
                    if (d < best) best = d, kind = 0, bp = t, bq = i, bl = -q;
                }
                for (int t = k; t < r; ++t) {
                    if (t == j || cur.at(i, t).is_zero()) continue;
                    auto q = lead_divmod(cur.at(i, t), cur.at(i, j)).first;
                    if (q.is_zero()) continue;
                    int64_t d = 0;
                    for (int s = k; s < r; ++s) d += pot(cur.at(s, t) - cur.at(s, j) * q) - pot(cur.at(s, t));
                    if (d < best) best = d, kind = 1, bp = j, bq = t, bl = -q;
                }
            }
        if (kind == 0) row_add(bp, bq, bl);
        if (kind == 1) col_add(bp, bq, bl);
        return kind >= 0;
    }

private:
    ElemWord left_, right_;
};

// componentwise minimum exponent over the given elements (all polynomial)
ExpVec monomial_gcd(const std::vector<const RingElem*>& xs, int n, int c) {
    std::vector<int64_t> m(n, INT64_MAX);
    bool any = false;
    for (const auto* g : xs)
        for (const auto& t : g->terms()) {
            any = true;
            for (int i = 0; i < n; ++i) m[i] = std::min(m[i], t.first.num(i));
        }
    if (!any) return ExpVec::zero(n, c);
    return ExpVec(m, 0, c);
}

std::optional<RingElem> exact_div(const RingElem& a, const RingElem& b) {
    if (b.is_zero()) return std::nullopt;
    auto [q, rem] = lead_divmod(a, b);
    if (!rem.is_zero()) return std::nullopt;
    return q;
}

// cur = 1 + v w^T with w.v = 0 and a common zero index: commutator word
std::optional<ElemWord> rank_one_commutator(const RingMatrix& cur) {
    int r = cur.size(), n = cur.dim(), c = cur.base();
    RingMatrix N = cur - RingMatrix::identity(r, n, c, cur.field());
    int i0 = -1, j0 = -1;
    for (int i = 0; i < r && i0 < 0; ++i)
        for (int j = 0; j < r; ++j)
            if (!N.at(i, j).is_zero()) {
                i0 = i, j0 = j;
                break;
            }
    if (i0 < 0) return ElemWord{};
    for (int mode = 0; mode < 2; ++mode) {
        std::vector<RingElem> v(r, RingElem(n, c, cur.field())), w = v;
        bool ok = true;
        if (mode == 0) {
            std::vector<const RingElem*> col;
            for (int i = 0; i < r; ++i) col.push_back(&N.at(i, j0));
            ExpVec g = monomial_gcd(col, n, c);
            for (int i = 0; i < r; ++i) v[i] = N.at(i, j0).shifted(-g);
            for (int j = 0; j < r && ok; ++j) {
                auto q = exact_div(N.at(i0, j), v[i0]);
                if (!q) ok = false;
                else w[j] = *q;
            }
        } else {
            std::vector<const RingElem*> row;
            for (int j = 0; j < r; ++j) row.push_back(&N.at(i0, j));
            ExpVec g = monomial_gcd(row, n, c);
            for (int j = 0; j < r; ++j) w[j] = N.at(i0, j).shifted(-g);
            for (int i = 0; i < r && ok; ++i) {
                auto q = exact_div(N.at(i, j0), w[j0]);
                if (!q) ok = false;
                else v[i] = *q;
            }
        }
        if (!ok) continue;
        for (int i = 0; i < r && ok; ++i)
            for (int j = 0; j < r && ok; ++j)
                if (v[i] * w[j] != N.at(i, j)) ok = false;
        if (!ok) continue;
        RingElem wv(n, c, cur.field());
        for (int i = 0; i < r; ++i) wv += w[i] * v[i];
        if (!wv.is_zero()) continue;
        int m = -1;
        for (int i = 0; i < r; ++i)
            if (v[i].is_zero() && w[i].is_zero()) m = i;
        if (m < 0) continue;
        ElemWord x, y;
        for (int i = 0; i < r; ++i)
            if (!v[i].is_zero()) x.push_back({i + 1, m + 1, v[i]});
        for (int j = 0; j < r; ++j)
            if (!w[j].is_zero()) y.push_back({m + 1, j + 1, w[j]});
        ElemWord word = word_concat(word_concat(x, y), word_concat(word_inverse(x), word_inverse(y)));
        if (word_eval(word, r, n, c, cur.field()) == cur) return word;
    }
    return std::nullopt;
}

std::optional<ElemWord> run_elimination(const RingMatrix& A, int budget, bool tricks) {
    if (!is_polynomial_matrix(A)) throw PreconditionError("elimination needs a polynomial matrix");
    Elimination E(A);
    int r = A.size();
    for (int k = 0; k < r; ++k) {
        for (;;) {
            if (budget-- <= 0) return std::nullopt;
            if (auto u = E.find_unit(k)) {
                E.pivot(k, u->first, u->second);
                break;
            }
            if (E.lead_step(k)) continue;
            if (E.potential_step(k)) continue;
            if (tricks) {
                if (auto w = rank_one_commutator(E.cur)) {
                    ElemWord word = E.word(*w);
                    if (word_eval(word, r, A.dim(), A.base(), A.field()) == A) return word;
                }
            }
            return std::nullopt;
        }
    }
    if (!E.cur.is_identity()) return std::nullopt;
    ElemWord word = E.word();
    if (word_eval(word, r, A.dim(), A.base(), A.field()) != A) throw VerificationError("elimination produced a wrong word");
    return word;
}

}  // namespace

bool is_polynomial(const RingElem& g) {
    for (const auto& t : g.terms()) {
        if (!t.first.is_integral()) return false;
        for (int i = 0; i < t.first.dim(); ++i)
            if (t.first.num(i) < 0) return false;
    }
    return true;
}

bool is_polynomial_matrix(const RingMatrix& A) {
    for (int i = 0; i < A.size(); ++i)
        for (int j = 0; j < A.size(); ++j)
            if (!is_polynomial(A.at(i, j))) return false;
    return true;
}

std::vector<int> used_variables(const RingMatrix& A) {
    std::vector<int> out;
    for (int v = 0; v < A.dim(); ++v) {
        bool used = false;
        for (const auto& u : mat_support(A))
            if (u.num(v) != 0) used = true;
        if (used) out.push_back(v);
    }
    return out;
}

std::pair<RingElem, RingElem> lead_divmod(const RingElem& a, const RingElem& b) {
    if (b.is_zero()) throw PreconditionError("division by zero");
    Field f = a.field();
    const auto& [lb, cb] = b.terms().back();
    Rat inv = f.inv(cb);
    RingElem q(a.dim(), a.base(), f), rem(a.dim(), a.base(), f), p = a;
    while (!p.is_zero()) {
        auto [lu, cu] = p.terms().back();
        if (divides(lb, lu)) {
            RingElem m = RingElem::monomial(lu - lb, f.mul(cu, inv), f);
            q += m;
            p -= m * b;
        } else {
            RingElem t = RingElem::monomial(lu, cu, f);
            rem += t;
            p -= t;
        }
    }
    return {q, rem};
}

ElemWord base_factor_univariate(const RingMatrix& A) {
    if (A.size() < 2) throw PreconditionError("matrix size must be at least 2");
    if (!is_polynomial_matrix(A)) throw PreconditionError("univariate factorization needs polynomial entries");
    if (used_variables(A).size() > 1) throw PreconditionError("univariate factorization: more than one variable");
    if (!is_SL(A)) throw PreconditionError("determinant is not 1");
    Elimination E(A);
    int r = A.size();
    for (int k = 0; k < r; ++k) {
        // column Euclid: the leading exponents strictly drop, so this terminates
        for (;;) {
            int best = -1;
            for (int i = k; i < r; ++i)
                if (!E.cur.at(i, k).is_zero() &&
                    (best < 0 || E.cur.at(i, k).terms().back().first < E.cur.at(best, k).terms().back().first))
                    best = i;
            if (best < 0) throw PreconditionError("determinant is not 1");
            if (is_unit(E.cur.at(best, k))) {
                E.pivot(k, best, k);
                break;
            }
            bool moved = false;
            for (int t = k; t < r; ++t) {
                if (t == best || E.cur.at(t, k).is_zero()) continue;
                E.row_add(t, best, -lead_divmod(E.cur.at(t, k), E.cur.at(best, k)).first);
                moved = true;
            }
            if (!moved) throw PreconditionError("determinant is not 1");
        }
    }
    ElemWord w = E.word();
    if (word_eval(w, r, A.dim(), A.base(), A.field()) != A) throw VerificationError("univariate elimination failed");
    return w;
}

std::optional<ElemWord> eliminate(const RingMatrix& A, int budget) {
    return run_elimination(A, budget, false);
}

std::optional<ElemWord> base_factor_multivariate_heuristic(const RingMatrix& A, int budget) {
    if (A.size() < 3) throw PreconditionError("the multivariate heuristic needs r >= 3");
    if (!is_SL(A)) throw PreconditionError("determinant is not 1");
    return run_elimination(A, budget, true);
}

BaseFactorizer univariate_factorizer() {
    return {"univariate",
            [](const RingMatrix& A) { return is_polynomial_matrix(A) && used_variables(A).size() <= 1; },
            [](const RingMatrix& A) -> std::optional<ElemWord> { return base_factor_univariate(A); }};
}

BaseFactorizer heuristic_factorizer(int budget) {
    return {"heuristic", [](const RingMatrix& A) { return A.size() >= 3 && is_polynomial_matrix(A); },
            [budget](const RingMatrix& A) { return base_factor_multivariate_heuristic(A, budget); }};
}

BaseFactorizer oracle_factorizer(std::vector<OracleEntry> entries, int budget) {
    for (const auto& e : entries) {
        const auto& B = e.matrix;
        if (word_eval(e.word, B.size(), B.dim(), B.base(), B.field()) != B)
            throw VerificationError("oracle word '" + e.name + "' does not multiply to its matrix");
    }
    auto shared = std::make_shared<std::vector<OracleEntry>>(std::move(entries));
    auto same_ring = [](const RingMatrix& A, const RingMatrix& B) {
        return A.size() == B.size() && A.dim() == B.dim() && A.base() == B.base() && A.field() == B.field();
    };
    return {"oracle",
            [shared, same_ring](const RingMatrix& A) {
                for (const auto& e : *shared)
                    if (same_ring(A, e.matrix)) return true;
                return false;
            },
            [shared, same_ring, budget](const RingMatrix& A) -> std::optional<ElemWord> {
                for (const auto& e : *shared) {
                    if (!same_ring(A, e.matrix)) continue;
                    if (A == e.matrix) return e.word;
                    int r = A.size();
                    RingMatrix inv = word_eval(word_inverse(e.word), r, A.dim(), A.base(), A.field());
                    if (r >= 3) {
                        if (auto w = base_factor_multivariate_heuristic(A * inv, budget)) return word_concat(*w, e.word);
                        if (auto w = base_factor_multivariate_heuristic(inv * A, budget)) return word_concat(e.word, *w);
                    } else {
                        if (auto w = eliminate(A * inv, budget)) return word_concat(*w, e.word);
                        if (auto w = eliminate(inv * A, budget)) return word_concat(e.word, *w);
                    }
                }
                return std::nullopt;
            }};
}

std::vector<BaseFactorizer> default_factorizers() {
    return {univariate_factorizer(), heuristic_factorizer()};
}

// ---------------------------------------------------------------------------

int landing_level(const AffineMonoid& M, const ElemWord& w, int max_j) {
    for (int j = 0; j <= max_j; ++j) {
        bool ok = true;
        for (const auto& x : w) {
            for (const auto& t : x.lambda.terms()) {
                ExpVec u = frobenius_exp(t.first, j);
                if (!u.is_integral() || !M.contains(u)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (ok) return j;
    }
    throw BudgetExceeded("landing level: factors not in M after " + std::to_string(max_j) + " Frobenius steps");
}

RingMatrix transport_to_polynomial(const RingMatrix& A, const std::vector<ExpVec>& basis) {
    int k = static_cast<int>(basis.size());
    if (k < 1 || k > kMaxDim) throw PreconditionError("transport: basis size out of range");
    QMat Bt(A.dim(), QVec(k));
    for (int i = 0; i < k; ++i)
        for (int t = 0; t < A.dim(); ++t) Bt[t][i] = basis[i].coord(t);
    if (rank(Bt) != k) throw PreconditionError("transport: basis is not linearly independent");
    std::map<ExpVec, ExpVec> cache;
    auto image = [&](const ExpVec& u) {
        auto it = cache.find(u);
        if (it != cache.end()) return it->second;
        auto a = solve(Bt, u.to_qvec());
        if (!a) throw PreconditionError("transport: " + u.str() + " is outside the span of the basis");
        std::vector<int64_t> z;
        for (const auto& x : *a) {
            if (x.get_den() != 1 || x < 0)
                throw PreconditionError("transport: " + u.str() + " is not a nonnegative integer combination");
            if (!x.get_num().fits_slong_p()) throw BudgetExceeded("transport: exponent overflow");
            z.push_back(x.get_num().get_si());
        }
        ExpVec e(z, 0, A.base());
        cache.emplace(u, e);
        return e;
    };
    RingMatrix P(A.size(), k, A.base(), A.field());
    for (int i = 0; i < A.size(); ++i)
        for (int j = 0; j < A.size(); ++j) {
            std::vector<RingElem::Term> ts;
            for (const auto& [u, a] : A.at(i, j).terms()) ts.push_back({image(u), a});
            P.at(i, j) = RingElem::from_terms(k, A.base(), A.field(), ts);
        }
    return P;
}

ElemWord pull_back(const ElemWord& w, const std::vector<ExpVec>& basis) {
    if (basis.empty()) throw PreconditionError("pull_back: empty basis");
    int n = basis[0].dim(), c = basis[0].base();
    ElemWord out;
    for (const auto& x : w) {
        std::vector<RingElem::Term> ts;
        for (const auto& [a, coef] : x.lambda.terms()) {
            ExpVec u = ExpVec::zero(n, c);
            for (size_t i = 0; i < basis.size(); ++i)
                if (a.num(static_cast<int>(i)) != 0) u = u + basis[i].scaled(a.num(static_cast<int>(i)));
            ts.push_back({u, coef});
        }
        out.push_back({x.p, x.q, RingElem::from_terms(n, c, x.lambda.field(), ts)});
    }
    return out;
}

CheckResult verify_factorization(const AffineMonoid& M, const FactorizationCertificate& cert) {
    const RingMatrix& A = cert.target;
    int r = A.size();
    if (cert.j_A < 0) return {false, "j_A is negative"};
    if (A.dim() != M.ambient_dim() || A.base() != M.base()) return {false, "target ring does not match the monoid"};
    for (const auto& x : cert.word)
        if (x.p == x.q || x.p < 1 || x.q < 1 || x.p > r || x.q > r) return {false, "factor indices out of range"};
    if (!is_SL(A)) return {false, "det(target) = 1"};
    for (const auto& x : cert.word)
        for (const auto& t : x.lambda.terms())
            if (!t.first.is_integral() || !M.contains(t.first))
                return {false, "factor monomial " + t.first.str() + " lies in M"};
    if (word_eval(cert.word, r, A.dim(), A.base(), A.field()) != mat_frobenius(A, cert.j_A))
        return {false, "product identity word_eval(word) = frobenius(target, j_A)"};
    return {};
}

namespace {

RingMatrix face_part(const RingMatrix& A, const Cone& F) {
    RingMatrix B(A.size(), A.dim(), A.base(), A.field());
    for (int i = 0; i < A.size(); ++i)
        for (int j = 0; j < A.size(); ++j) B.at(i, j) = face_projection(A.at(i, j), F);
    return B;
}

std::string cone_str(const Cone& F) {
    std::string s = "cone(";
    for (size_t i = 0; i < F.rays().size(); ++i) s += (i ? "," : "") + to_string(F.rays()[i]);
    return s + ")";
}

struct Attempt {
    ElemWord word;
    std::string id;
};

std::optional<Attempt> run_factorizers(const RingMatrix& P, const DescentConfig& cfg) {
    for (const auto& f : cfg.factorizers) {
        if (!f.applies(P)) continue;
        try {
            auto w = f.factor(P);
            if (w && word_eval(*w, P.size(), P.dim(), P.base(), P.field()) == P) return Attempt{*w, f.id};
        } catch (const PreconditionError&) {
        } catch (const BudgetExceeded&) {
        }
    }
    return std::nullopt;
}

}  // namespace

bool processed_face_exclusion(const RingMatrix& R, const std::vector<Cone>& faces) {
    for (const auto& u : mat_support(R)) {
        if (u.is_zero()) continue;
        for (const auto& F : faces)
            if (F.contains(u)) return false;
    }
    return true;
}

FacetReduction facet_reduce(const RingMatrix& A, const AffineMonoid& M, const SubFactorizer& sub) {
    if (A.dim() != M.ambient_dim() || A.base() != M.base()) throw PreconditionError("facet_reduce: ring mismatch");
    FacetReduction out;
    out.residual = A;
    int r = A.size();
    std::vector<Cone> done;
    for (const Cone& F : M.cone().facets()) {
        RingMatrix B = face_part(out.residual, F);
        FacetStep step{F, 0, 0};
        if (!B.is_identity()) {
            FactorizationCertificate cf;
            try {
                cf = sub(B, face_restrict(M, F));
            } catch (const BudgetExceeded& e) {
                throw BudgetExceeded("facet " + cone_str(F) + ": " + e.what());
            } catch (const PreconditionError& e) {
                throw PreconditionError("facet " + cone_str(F) + ": " + e.what());
            } catch (const VerificationError& e) {
                throw VerificationError("facet " + cone_str(F) + ": " + e.what());
            } catch (const Error& e) {
                throw Error("facet " + cone_str(F) + ": " + e.what());
            }
            if (word_eval(cf.word, r, A.dim(), A.base(), A.field()) != mat_frobenius(B, cf.j_A))
                throw VerificationError("facet " + cone_str(F) + ": sub-factorization does not multiply out");
            if (cf.j_A > 0) {
                out.residual = mat_frobenius(out.residual, cf.j_A);
                out.word = word_frobenius(out.word, cf.j_A);
                out.level += cf.j_A;
            }
            out.residual = word_eval(word_inverse(cf.word), r, A.dim(), A.base(), A.field()) * out.residual;
            out.word = word_concat(out.word, cf.word);
            step.frobenius = cf.j_A;
            step.word_length = cf.word.size();
        }
        done.push_back(F);
        out.steps.push_back(step);
        if (!processed_face_exclusion(out.residual, done))
            throw VerificationError("facet_reduce: residual meets a processed face after " + cone_str(F));
    }
    return out;
}

FactorizationCertificate simplicial_factor(const RingMatrix& A, const AffineMonoid& M, const DescentConfig& cfg,
                                           bool require_interior) {
    if (A.size() < 3) throw PreconditionError("simplicial_factor needs r >= 3");
    if (!M.is_simplicial()) throw PreconditionError("simplicial_factor: the monoid is not simplicial");
    if (!is_SL(A)) throw PreconditionError("determinant is not 1");
    FactorizationCertificate cert;
    cert.target = A;
    if (A.is_identity()) return cert;
    std::vector<ExpVec> S;
    for (const auto& u : mat_support(A)) {
        if (u.is_zero()) continue;
        if (!M.hull_interior_contains(u)) throw PreconditionError("simplicial_factor: " + u.str() + " is not interior");
        S.push_back(u);
    }
    auto finish = [&](const ElemWord& hull, const std::string& stage, const std::string& note) {
        int J = landing_level(M, hull, cfg.max_frobenius);
        cert.j_A = J;
        cert.word = word_frobenius(hull, J);
        cert.provenance.push_back({stage, 0, cert.word.size(), note});
        auto chk = verify_factorization(M, cert);
        if (!chk.ok) throw VerificationError("simplicial_factor: " + chk.failure);
        return cert;
    };
    if (S.empty()) {
        // constant matrix: Gaussian elimination over the field
        return finish(base_factor_univariate(A), "field", "constant matrix");
    }
    FreeCover fc = free_cover(M, S);
    RingMatrix P = transport_to_polynomial(A, fc.basis);
    if (auto att = run_factorizers(P, cfg))
        return finish(pull_back(att->word, fc.basis), "simplicial", "free cover, " + att->id);
    if (!require_interior) {
        auto ext = M.extreme_generators();
        for (int t = 0; t <= cfg.max_frobenius; ++t) {
            std::vector<ExpVec> basis;
            for (const auto& g : ext) basis.push_back(frobenius_exp(g, -t));
            RingMatrix Q;
            try {
                Q = transport_to_polynomial(A, basis);
            } catch (const PreconditionError&) {
                continue;
            }
            if (auto att = run_factorizers(Q, cfg))
                return finish(pull_back(att->word, basis), "sandwich",
                              "extreme generators / c^" + std::to_string(t) + ", " + att->id);
            break;
        }
    }
    throw BudgetExceeded("simplicial_factor: no base factorizer succeeded (heuristic budget " +
                         std::to_string(cfg.heuristic_budget) + ")");
}

// ---------------------------------------------------------------------------

bool supported_over(const RingMatrix& A, const Hyperplane& G, const Polytope& phiL) {
    for (const auto& u : mat_support(A)) {
        if (u.is_zero()) continue;
        auto p = phi_image(u, G);
        if (!p || !phiL.interior_contains(*p)) return false;
    }
    return true;
}

namespace {

QVec homothety(const QVec& xi, const Rat& lambda, const QVec& x) {
    return add(xi, scale(sub(x, xi), lambda));
}

Polytope homothety(const QVec& xi, const Rat& lambda, const Polytope& P) {
    QMat pts;
    for (const auto& v : P.vertices()) pts.push_back(homothety(xi, lambda, v));
    return Polytope::from_points(pts);
}

// the eps-ball (inside G) around every point of Q lies in the interior of P;
// both polytopes full-dimensional in G
bool ball_inside(const Polytope& Q, const Polytope& P, const Hyperplane& G, const Rat& eps) {
    Rat gg = dot(G.a, G.a);
    for (const auto& [a0, a] : P.inequalities()) {
        QVec ap = sub(a, scale(G.a, dot(a, G.a) / gg));
        Rat na = dot(ap, ap);
        for (const auto& y : Q.vertices()) {
            Rat h = a0 + dot(a, y);
            if (h <= 0 || h * h <= eps * eps * na) return false;
        }
    }
    return true;
}

}  // namespace

PyramidalStep pyramidal_descent_step(const RingMatrix& A, const AffineMonoid& N, const Hyperplane& G,
                                     const Polytope& phiL, const DescentConfig& cfg) {
    int r = A.size(), n = N.ambient_dim(), c = N.base();
    if (r < 3) throw PreconditionError("pyramidal descent needs r >= 3");
    if (N.rank() != n || n < 2) throw PreconditionError("pyramidal descent needs a full-rank monoid of rank >= 2");
    if (A.dim() != n || A.base() != c) throw PreconditionError("pyramidal descent: ring mismatch");
    Polytope phiN = cross_section(N.cone(), G);
    if (!is_pyramidal_extension(phiL, phiN)) throw PreconditionError("pyramidal descent: not a pyramidal extension");
    PyramidalStep out;
    out.residual = A;
    if (supported_over(A, G, phiL)) {
        out.lambda = 1;
        return out;
    }
    for (const auto& u : mat_support(A))
        if (!u.is_zero() && !N.hull_interior_contains(u))
            throw PreconditionError("pyramidal descent: " + u.str() + " is not in the interior hull of N");

    // the cut-off vertex and the base facet of phiL facing it
    QVec v;
    for (const auto& x : phiN.vertices())
        if (!phiL.contains(x)) v = x;
    Rat a0;
    QVec a;
    int visible = 0;
    for (const auto& [b0, b] : phiL.inequalities())
        if (b0 + dot(b, v) < 0) a0 = b0, a = b, ++visible;
    if (visible != 1) throw Error("pyramidal descent: the apex sees more than one facet");
    QMat d1{v};
    for (const auto& x : phiL.vertices())
        if (a0 + dot(a, x) == 0) d1.push_back(x);
    out.delta1 = Polytope::from_points(d1);

    // Delta_2: the tangent cone of phiN at v cut at twice the height of phiN
    QMat dirs;
    for (const auto& x : phiN.vertices())
        if (x != v) dirs.push_back(sub(x, v));
    Cone tangent = Cone::from_generators(dirs, n);
    int d = phiN.dim();
    if (static_cast<int>(tangent.rays().size()) != d)
        throw PreconditionError("pyramidal descent: Delta_2 is not a simplex (beyond desk scale)");
    Rat hv = a0 + dot(a, v), hmax = 0;
    for (const auto& x : phiN.vertices()) hmax = std::max<Rat>(hmax, a0 + dot(a, x));
    Rat T = 2 * hmax + 1;
    QMat d2{v};
    for (const auto& dir : tangent.rays()) d2.push_back(add(v, scale(dir, (T - hv) / dot(a, dir))));
    out.delta2 = Polytope::from_points(d2);

    QVec xi = phiL.centroid();
    std::vector<QVec> images;
    for (const auto& u : mat_support(A))
        if (!u.is_zero()) images.push_back(*phi_image(u, G));

    for (int t = 1; t <= cfg.lambda_steps; ++t) {
        Rat lambda = 1 - Rat(1, ipow(2, static_cast<unsigned long>(t)));
        Polytope D2 = homothety(xi, lambda, out.delta2);
        bool covered = true;
        for (const auto& p : images)
            if (!D2.interior_contains(p)) covered = false;
        if (!covered) continue;
        Polytope L1 = homothety(xi, lambda, phiL), D1 = homothety(xi, lambda, out.delta1);
        std::optional<Rat> eps;
        for (int s = 1; s <= cfg.eps_steps && !eps; ++s) {
            Rat e(1, ipow(2, static_cast<unsigned long>(s)));
            if (ball_inside(L1, phiL, G, e) && ball_inside(D1, phiN, G, e)) eps = e;
        }
        if (!eps) continue;
        if (cfg.log) cfg.log("pyramidal step: lambda " + to_string(lambda) + ", eps " + to_string(*eps));

        // N restricted to the shrunken Delta_2 (saturated in gp(N))
        Cone CW = Cone::from_generators(D2.vertices(), n);
        auto hb = hilbert_basis(CW, c, N.group_basis());
        AffineMonoid N2 = AffineMonoid::from_generators(hb);
        FactorizationCertificate sf = simplicial_factor(A, N2, cfg, true);
        ElemWord E = word_frobenius(sf.word, -sf.j_A);

        // cut through the image of the base facet; side 2 faces phiL
        Rat gl = G.level;
        Rat hl0 = lambda * a0 + (lambda - 1) * dot(a, xi);
        QVec cut = add(a, scale(G.a, hl0 / gl));
        SeparationProblem P(N2, Hyperplane{cut, Rat(0)}, G, *eps, r, A.field());
        SeparationCertificate sc = almost_separate(P, E, cfg.separation);
        auto chk = verify_separation(P, E, sc);
        if (!chk.ok) throw VerificationError("pyramidal descent: separation certificate: " + chk.failure);
        out.word = sc.A1;
        out.residual = sc.A2;
        out.lambda = lambda;
        out.eps = *eps;
        out.separation_iterations = sc.iterations;
        if (word_eval(out.word, r, n, c, A.field()) * out.residual != A)
            throw VerificationError("pyramidal descent: product identity");
        if (!supported_over(out.residual, G, phiL))
            throw VerificationError("pyramidal descent: residual leaves the interior of Phi(L)");
        return out;
    }
    throw BudgetExceeded("pyramidal descent: no lambda = 1 - 2^-t with t <= " + std::to_string(cfg.lambda_steps) +
                         " covers the support");
}

// ---------------------------------------------------------------------------

namespace {

void append(FactorizationCertificate& cert, const ElemWord& w, const std::string& stage, const std::string& note) {
    size_t b = cert.word.size();
    cert.word = word_concat(cert.word, w);
    cert.provenance.push_back({stage, b, cert.word.size(), note});
}

}  // namespace

FactorizationCertificate factorize(const RingMatrix& A, const AffineMonoid& M, const DescentConfig& cfg) {
    int r = A.size(), n = A.dim(), c = A.base();
    if (r < 3) throw PreconditionError("factorize needs r >= 3");
    if (n != M.ambient_dim() || c != M.base()) throw PreconditionError("factorize: ring does not match the monoid");
    for (const auto& u : mat_support(A))
        if (!u.is_integral() || !M.contains(u)) throw PreconditionError("factorize: " + u.str() + " is not in M");
    if (!is_SL(A)) throw PreconditionError("determinant is not 1");

    FactorizationCertificate cert;
    cert.target = A;
    auto done = [&](FactorizationCertificate& out) {
        auto chk = verify_factorization(M, out);
        if (!chk.ok) throw VerificationError("factorize: " + chk.failure);
        return out;
    };
    if (A.is_identity()) return done(cert);
    bool constant = true;
    for (const auto& u : mat_support(A))
        if (!u.is_zero()) constant = false;
    if (constant || M.rank() == 0) {
        append(cert, base_factor_univariate(A), "field", "constant matrix");
        return done(cert);
    }
    if (M.rank() == 1) {
        // k[M] sits in k[t] with t the generator of gp(M)
        ExpVec g = ExpVec::from_qvec(to_qvec(M.group_basis()[0]), c);
        if (!M.cone().contains(g)) g = -g;
        ElemWord w = pull_back(base_factor_univariate(transport_to_polynomial(A, {g})), {g});
        int J = landing_level(M, w, cfg.max_frobenius);
        cert.j_A = J;
        append(cert, word_frobenius(w, J), "univariate", "rank-one monoid");
        return done(cert);
    }

    // excision: peel the facets, recursing on the facet monoids
    FacetReduction fr = facet_reduce(A, M, [&](const RingMatrix& B, const AffineMonoid& MF) {
        DescentConfig sub = cfg;
        return factorize(B, MF, sub);
    });
    int level = fr.level;
    ElemWord hull = fr.word;
    std::vector<ProvenanceEntry> prov{{"facet", 0, fr.word.size(), std::to_string(fr.steps.size()) + " facets"}};
    RingMatrix R = fr.residual;
    if (cfg.log) cfg.log("facet reduction: " + std::to_string(fr.word.size()) + " factors, level " + std::to_string(level));

    auto add_hull = [&](const ElemWord& w, const std::string& stage, const std::string& note) {
        size_t b = hull.size();
        hull = word_concat(hull, w);
        prov.push_back({stage, b, hull.size(), note});
    };

    if (!M.is_simplicial()) {
        if (M.rank() != n) throw PreconditionError("factorize: non-simplicial monoids must have full rank");
        QVec deg = M.degree();
        Hyperplane G{deg, Rat(1)};
        Polytope cur = cross_section(M.cone(), G);
        AffineMonoid N = M;
        int d = cur.dim();
        while (static_cast<int>(cur.vertices().size()) > d + 1) {
            std::optional<Polytope> next;
            for (const auto& v : cur.vertices()) {
                QMat rest;
                for (const auto& w : cur.vertices())
                    if (w != v) rest.push_back(w);
                Polytope Q = Polytope::from_points(rest);
                if (Q.dim() == d && is_pyramidal_extension(Q, cur)) {
                    next = Q;
                    break;
                }
            }
            if (!next) throw BudgetExceeded("factorize: no pyramidal vertex cut of " + cur.str());
            PyramidalStep ps = pyramidal_descent_step(R, N, G, *next, cfg);
            add_hull(ps.word, "pyramidal", "cut to " + next->str() + ", lambda " + to_string(ps.lambda));
            R = ps.residual;
            cur = *next;
            N = polytope_restrict(M, cur);
        }
        FactorizationCertificate sf = simplicial_factor(R, N, cfg, false);
        add_hull(word_frobenius(sf.word, -sf.j_A), sf.provenance.empty() ? "simplicial" : sf.provenance[0].stage,
                 sf.provenance.empty() ? "" : sf.provenance[0].note);
    } else {
        FactorizationCertificate sf = simplicial_factor(R, M, cfg, false);
        add_hull(word_frobenius(sf.word, -sf.j_A), sf.provenance.empty() ? "simplicial" : sf.provenance[0].stage,
                 sf.provenance.empty() ? "" : sf.provenance[0].note);
    }

    // hull word for frobenius(A, level); land every factor in M
    int J = landing_level(M, hull, cfg.max_frobenius);
    cert.j_A = level + J;
    cert.word = word_frobenius(hull, J);
    cert.provenance = prov;
    return done(cert);
}

}  // namespace mf
