#include "mf/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace mf {

namespace {
thread_local bool g_strict = false;
}

void set_strict_context(bool on) {
    g_strict = on;
}
bool strict_context() {
    return g_strict;
}

Rat Field::reduce(const Rat& a) const {
    if (!p) {
        Rat r = a;
        r.canonicalize();
        return r;
    }
    Int P(static_cast<unsigned long>(p));
    Int num = a.get_num(), den = a.get_den();
    Int r;
    mpz_mod(r.get_mpz_t(), num.get_mpz_t(), P.get_mpz_t());
    if (den != 1) {
        Int di;
        if (!mpz_invert(di.get_mpz_t(), den.get_mpz_t(), P.get_mpz_t()))
            throw PreconditionError("denominator divisible by the characteristic");
        r = (r * di) % P;
    }
    return Rat(r);
}

Rat Field::inv(const Rat& a) const {
    if (a == 0) throw Error("division by zero coefficient");
    if (!p) return 1 / a;
    return reduce(Rat(1) / a);
}

Field parse_field(std::string_view s) {
    std::string t(s);
    if (t == "Q" || t == "QQ" || t == "0") return Field{0};
    if (!t.empty() && (t[0] == 'F' || t[0] == 'f')) t.erase(0, 1);
    if (t.rfind("p=", 0) == 0) t.erase(0, 2);
    uint64_t p = 0;
    try {
        p = std::stoull(t);
    } catch (...) {
        throw ParseError("bad field '" + std::string(s) + "' (use Q or F<p>)");
    }
    if (p < 2) throw ParseError("field characteristic must be a prime");
    for (uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) throw ParseError("field characteristic must be a prime");
    return Field{p};
}

bool Interval::contains(const Rat& x) const {
    if (empty) return false;
    if (lo) {
        if (lo_closed ? x < *lo : x <= *lo) return false;
    }
    if (hi) {
        if (hi_closed ? x > *hi : x >= *hi) return false;
    }
    return true;
}

RingElem RingElem::constant(int n, int c, const Rat& a, Field f) {
    RingElem r(n, c, f);
    Rat v = f.reduce(a);
    if (v != 0) r.terms_.push_back({ExpVec::zero(n, c), v});
    return r;
}

RingElem RingElem::monomial(const ExpVec& u, const Rat& a, Field f) {
    RingElem r(u.dim(), u.base(), f);
    Rat v = f.reduce(a);
    if (v != 0) r.terms_.push_back({u, v});
    return r;
}

RingElem& RingElem::with_context(ContextPtr ctx) {
    ctx_ = std::move(ctx);
    check_context();
    return *this;
}

void RingElem::check_context() const {
    if (!g_strict || !ctx_) return;
    for (const auto& [u, a] : terms_)
        if (!ctx_->contains(u)) throw PreconditionError("exponent " + u.str() + " is outside the context " + ctx_->name);
}

void RingElem::check_compat(const RingElem& o) const {
    if (n_ != o.n_ || c_ != o.c_) throw PreconditionError("ring element dimension/base mismatch");
    if (field_ != o.field_) throw PreconditionError("ring element field mismatch");
    if (ctx_ && o.ctx_ && ctx_ != o.ctx_) throw PreconditionError("ring element context mismatch");
}

bool RingElem::is_one() const {
    return terms_.size() == 1 && terms_[0].first.is_zero() && terms_[0].second == 1;
}

bool RingElem::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_zero());
}

Rat RingElem::coeff(const ExpVec& u) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), u,
                               [](const Term& t, const ExpVec& v) { return t.first < v; });
    if (it != terms_.end() && it->first == u) return it->second;
    return 0;
}

int RingElem::max_denom_pow() const {
    int j = 0;
    for (const auto& t : terms_) j = std::max(j, t.first.denom_pow());
    return j;
}

RingElem RingElem::from_terms(int n, int c, Field f, std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    RingElem r(n, c, f);
    for (auto& t : terms) {
        if (!r.terms_.empty() && r.terms_.back().first == t.first) {
            r.terms_.back().second = f.add(r.terms_.back().second, f.reduce(t.second));
        } else {
            r.terms_.push_back({t.first, f.reduce(t.second)});
        }
    }
    r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(), [](const Term& t) { return t.second == 0; }),
                   r.terms_.end());
    return r;
}

RingElem RingElem::operator+(const RingElem& o) const {
    check_compat(o);
    RingElem r(n_, c_, field_);
    r.ctx_ = ctx_ ? ctx_ : o.ctx_;
    r.terms_.reserve(terms_.size() + o.terms_.size());
    size_t i = 0, k = 0;
    while (i < terms_.size() || k < o.terms_.size()) {
        if (k == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[k].first)) {
            r.terms_.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[k].first < terms_[i].first) {
            r.terms_.push_back(o.terms_[k++]);
        } else {
            Rat s = field_.add(terms_[i].second, o.terms_[k].second);
            if (s != 0) r.terms_.push_back({terms_[i].first, s});
            ++i;
            ++k;
        }
    }
    return r;
}

RingElem RingElem::operator-() const {
    RingElem r = *this;
    for (auto& t : r.terms_) t.second = field_.neg(t.second);
    return r;
}

RingElem RingElem::operator-(const RingElem& o) const {
    return *this + (-o);
}

RingElem RingElem::operator*(const RingElem& o) const {
    check_compat(o);
    RingElem r(n_, c_, field_);
    r.ctx_ = ctx_ ? ctx_ : o.ctx_;
    if (terms_.empty() || o.terms_.empty()) return r;
    std::unordered_map<ExpVec, Rat, ExpVecHash> acc;
    acc.reserve(terms_.size() * o.terms_.size());
    for (const auto& [u, a] : terms_)
        for (const auto& [v, b] : o.terms_) {
            auto [it, fresh] = acc.try_emplace(u + v, 0);
            it->second += a * b;
        }
    r.terms_.reserve(acc.size());
    for (auto& [u, a] : acc) {
        Rat v = field_.reduce(a);
        if (v != 0) r.terms_.push_back({u, v});
    }
    std::sort(r.terms_.begin(), r.terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    r.check_context();
    return r;
}

RingElem RingElem::scaled(const Rat& a) const {
    Rat v = field_.reduce(a);
    RingElem r(n_, c_, field_);
    r.ctx_ = ctx_;
    if (v == 0) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.second = field_.mul(t.second, v);
    return r;
}

RingElem RingElem::shifted(const ExpVec& u) const {
    RingElem r(n_, c_, field_);
    r.ctx_ = ctx_;
    r.terms_.reserve(terms_.size());
    for (const auto& [v, a] : terms_) r.terms_.push_back({v + u, a});
    std::sort(r.terms_.begin(), r.terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    r.check_context();
    return r;
}

bool RingElem::operator==(const RingElem& o) const {
    return n_ == o.n_ && c_ == o.c_ && field_ == o.field_ && terms_ == o.terms_;
}

std::string RingElem::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < terms_.size(); ++i) {
        const auto& [u, a] = terms_[i];
        Rat mag = a;
        bool negative = false;
        if (!field_.p && a < 0) {
            negative = true;
            mag = -a;
        }
        if (i == 0)
            s += negative ? "-" : "";
        else
            s += negative ? " - " : " + ";
        if (u.is_zero())
            s += mag.get_str();
        else
            s += mag.get_str() + "*" + u.str();
    }
    return s;
}

RingElem add(const RingElem& a, const RingElem& b) {
    return a + b;
}
RingElem mul(const RingElem& a, const RingElem& b) {
    return a * b;
}

std::set<ExpVec> support(const RingElem& g) {
    std::set<ExpVec> s;
    for (const auto& t : g.terms()) s.insert(t.first);
    return s;
}

RingElem slice(const RingElem& g, const Interval& I) {
    std::vector<RingElem::Term> kept;
    for (const auto& t : g.terms())
        if (I.contains(nth_coord(t.first))) kept.push_back(t);
    RingElem r = RingElem::from_terms(g.dim(), g.base(), g.field(), kept);
    if (g.context()) r.with_context(g.context());
    return r;
}

Polytope phi_polytope(const RingElem& g, const Hyperplane& G) {
    QMat pts;
    for (const auto& t : g.terms()) {
        if (t.first.is_zero()) throw PreconditionError("phi_polytope: the unit monomial has no Φ-image");
        auto p = phi_image(t.first, G);
        if (!p) throw PreconditionError("phi_polytope: support monomial misses the hyperplane");
        pts.push_back(*p);
    }
    if (pts.empty()) throw PreconditionError("phi_polytope of zero");
    return Polytope::from_points(pts);
}

RingElem face_projection(const RingElem& g, const Cone& F) {
    std::vector<RingElem::Term> kept;
    for (const auto& t : g.terms())
        if (F.contains(t.first)) kept.push_back(t);
    return RingElem::from_terms(g.dim(), g.base(), g.field(), kept);
}

RingElem facet_projection(const RingElem& g, const Cone& C, const Cone& F) {
    if (!C.is_face(F)) throw PreconditionError("facet_projection: F is not a face of the cone");
    return face_projection(g, F);
}

RingElem frobenius(const RingElem& g, int j) {
    std::vector<RingElem::Term> t;
    t.reserve(g.size());
    for (const auto& [u, a] : g.terms()) t.push_back({frobenius_exp(u, j), a});
    return RingElem::from_terms(g.dim(), g.base(), g.field(), t);
}

Rat augmentation(const RingElem& g) {
    return g.coeff(ExpVec::zero(g.dim(), g.base()));
}

RingElem parse_elem(std::string_view in, int n, int c, Field f) {
    std::string s;
    for (char ch : in)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ParseError("empty ring element");
    std::vector<RingElem::Term> terms;
    size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            if (s[pos] == '-') sign = -sign;
            ++pos;
        }
        size_t start = pos;
        int depth = 0;
        while (pos < s.size()) {
            char ch = s[pos];
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            if (depth == 0 && (ch == '+' || ch == '-') && pos > start && s[pos - 1] != '^') break;
            ++pos;
        }
        std::string atom = s.substr(start, pos - start);
        if (atom.empty()) throw ParseError("dangling sign in ring element: " + s);
        Rat coef = 1;
        ExpVec u = ExpVec::zero(n, c);
        auto paren = atom.find('(');
        if (paren == std::string::npos) {
            coef = parse_rat(atom);
        } else {
            std::string cs = atom.substr(0, paren);
            if (!cs.empty()) {
                if (cs.back() != '*') throw ParseError("expected '*' before exponent in: " + atom);
                cs.pop_back();
                coef = parse_rat(cs);
            }
            u = parse_expvec(atom.substr(paren), c);
            if (u.dim() != n) throw ParseError("exponent dimension differs from n in: " + atom);
        }
        terms.push_back({u, Rat(sign) * coef});
    }
    return RingElem::from_terms(n, c, f, terms);
}

}  // namespace mf
