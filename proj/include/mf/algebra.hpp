#pragma once
// Sparse elements of k[M^{c^{-j}}] with coefficients in Q or F_p.

#include "mf/lattice.hpp"
#include "mf/polyhedra.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>

namespace mf {

// Coefficient field: p == 0 means Q, otherwise F_p with p prime.
struct Field {
    uint64_t p = 0;
    bool operator==(const Field& o) const { return p == o.p; }
    bool operator!=(const Field& o) const { return p != o.p; }
    Rat reduce(const Rat& a) const;
    Rat add(const Rat& a, const Rat& b) const { return p ? reduce(a + b) : Rat(a + b); }
    Rat mul(const Rat& a, const Rat& b) const { return p ? reduce(a * b) : Rat(a * b); }
    Rat neg(const Rat& a) const { return p ? reduce(-a) : Rat(-a); }
    Rat inv(const Rat& a) const;
    std::string str() const { return p ? "F" + std::to_string(p) : "Q"; }
};
Field parse_field(std::string_view s);

// Optional membership context used in strict mode.
struct RingContext {
    std::string name;
    std::function<bool(const ExpVec&)> contains;
};
using ContextPtr = std::shared_ptr<const RingContext>;

// When on, every result key is checked against the element's context.
void set_strict_context(bool on);
bool strict_context();

struct Interval {
    std::optional<Rat> lo, hi;  // unset = unbounded
    bool lo_closed = true, hi_closed = true;
    bool empty = false;
    bool contains(const Rat& x) const;
    static Interval closed(const Rat& a, const Rat& b) { return {a, b, true, true, false}; }
    static Interval at_least(const Rat& a) { return {a, std::nullopt, true, true, false}; }
    static Interval below(const Rat& a) { return {std::nullopt, a, true, false, false}; }
    static Interval none() {
        Interval I;
        I.empty = true;
        return I;
    }
};

class RingElem {
public:
    using Term = std::pair<ExpVec, Rat>;

    RingElem() = default;
    RingElem(int n, int c, Field f = {}) : n_(n), c_(c), field_(f) {}
    static RingElem constant(int n, int c, const Rat& a, Field f = {});
    static RingElem monomial(const ExpVec& u, const Rat& a = 1, Field f = {});

    int dim() const { return n_; }
    int base() const { return c_; }
    const Field& field() const { return field_; }
    const ContextPtr& context() const { return ctx_; }
    RingElem& with_context(ContextPtr ctx);

    // sorted by ExpVec order, no zero coefficients
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    bool is_constant() const;
    size_t size() const { return terms_.size(); }
    Rat coeff(const ExpVec& u) const;
    int max_denom_pow() const;

    RingElem operator+(const RingElem& o) const;
    RingElem operator-(const RingElem& o) const;
    RingElem operator-() const;
    RingElem operator*(const RingElem& o) const;
    RingElem scaled(const Rat& a) const;
    RingElem shifted(const ExpVec& u) const;  // times the monomial u
    RingElem& operator+=(const RingElem& o) { return *this = *this + o; }
    RingElem& operator-=(const RingElem& o) { return *this = *this - o; }

    bool operator==(const RingElem& o) const;
    bool operator!=(const RingElem& o) const { return !(*this == o); }

    std::string str() const;
    // build from arbitrary (possibly repeated, zero) terms
    static RingElem from_terms(int n, int c, Field f, std::vector<Term> terms);

private:
    void check_compat(const RingElem& o) const;
    void check_context() const;

    int n_ = 1;
    int c_ = 2;
    Field field_;
    ContextPtr ctx_;
    std::vector<Term> terms_;
};

RingElem add(const RingElem& a, const RingElem& b);
RingElem mul(const RingElem& a, const RingElem& b);
std::set<ExpVec> support(const RingElem& g);
RingElem slice(const RingElem& g, const Interval& I);
// convex hull of the Φ-images of the support
Polytope phi_polytope(const RingElem& g, const Hyperplane& G);
// keep the terms whose exponent lies in the face F of C
RingElem facet_projection(const RingElem& g, const Cone& C, const Cone& F);
RingElem face_projection(const RingElem& g, const Cone& F);
RingElem frobenius(const RingElem& g, int j);
Rat augmentation(const RingElem& g);

// "2*(1,1) - (2,0)/2^1 + 3"; bare numbers are constants
RingElem parse_elem(std::string_view s, int n, int c, Field f = {});

}  // namespace mf
