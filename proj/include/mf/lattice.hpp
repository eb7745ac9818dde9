#pragma once
// Exponent vectors with denominators restricted to powers of a fixed base c.

#include "mf/core.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace mf {

inline constexpr int kMaxDim = 8;

class ExpVec {
public:
    ExpVec() = default;
    // numerators / c^j, canonicalized
    ExpVec(const std::vector<int64_t>& num, int j, int c);
    static ExpVec zero(int n, int c);
    static ExpVec unit(int n, int i, int c);
    // exact conversion; throws if some denominator is not a power of c
    static ExpVec from_qvec(const QVec& v, int c);

    int dim() const { return n_; }
    int base() const { return c_; }
    int denom_pow() const { return j_; }
    int64_t num(int i) const { return num_[i]; }
    std::vector<int64_t> numerators() const;
    Rat coord(int i) const;
    QVec to_qvec() const;
    bool is_zero() const;
    bool is_integral() const { return j_ == 0; }

    ExpVec operator+(const ExpVec& o) const;
    ExpVec operator-(const ExpVec& o) const;
    ExpVec operator-() const;
    ExpVec scaled(int64_t k) const;
    // numerators with respect to denominator c^j (j >= denom_pow)
    std::vector<int64_t> numerators_at(int j) const;

    bool operator==(const ExpVec& o) const;
    bool operator!=(const ExpVec& o) const { return !(*this == o); }
    // graded order on rational coordinates: total degree, then lex
    bool operator<(const ExpVec& o) const;

    size_t hash() const;
    std::string str() const;

private:
    void canonicalize();
    void check_compat(const ExpVec& o) const;

    std::array<int64_t, kMaxDim> num_{};
    int16_t n_ = 0;
    int16_t j_ = 0;
    int32_t c_ = 2;
};

struct ExpVecHash {
    size_t operator()(const ExpVec& u) const { return u.hash(); }
};

ExpVec expvec_add(const ExpVec& u, const ExpVec& v);
// c^j * u; negative j divides by c^|j|
ExpVec frobenius_exp(const ExpVec& u, int j);
Rat nth_coord(const ExpVec& u);
Rat sq_norm(const ExpVec& u);
Rat inner(const ExpVec& u, const ExpVec& v);
Rat eval(const QVec& functional, const ExpVec& u);

// parses "(3,1)/2^2", "(3,1)" or "(1/2,3/4)" (the last requires c-power denominators)
ExpVec parse_expvec(std::string_view s, int c);

// Affine hyperplane {x : a.x = level}.
struct Hyperplane {
    QVec a;
    Rat level;
    Rat value(const QVec& x) const;
    Rat value(const ExpVec& u) const;
    std::string str() const;
};

// syntax: "x2=0", "x1+x2=1", "2x1-x3=1/2"
Hyperplane parse_hyperplane(std::string_view s, int n);

// point of R_+ u on G, if any
std::optional<QVec> phi_image(const ExpVec& u, const Hyperplane& G);
std::optional<QVec> phi_image(const QVec& u, const Hyperplane& G);

int64_t checked_add(int64_t a, int64_t b);
int64_t checked_mul(int64_t a, int64_t b);
int64_t checked_pow(int64_t b, int e);

}  // namespace mf

template <>
struct std::hash<mf::ExpVec> {
    size_t operator()(const mf::ExpVec& u) const { return u.hash(); }
};
