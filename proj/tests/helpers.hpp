#pragma once
// Random generators shared by the property tests.

#include "mf/algebra.hpp"

#include <random>

namespace testutil {

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

inline int64_t rand_int(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng());
}

inline mf::ExpVec rand_expvec(int n, int c, int64_t range, int max_j) {
    std::vector<int64_t> v(n);
    for (auto& x : v) x = rand_int(-range, range);
    return mf::ExpVec(v, static_cast<int>(rand_int(0, max_j)), c);
}

inline mf::ExpVec rand_nonneg_expvec(int n, int c, int64_t range, int max_j) {
    std::vector<int64_t> v(n);
    for (auto& x : v) x = rand_int(0, range);
    return mf::ExpVec(v, static_cast<int>(rand_int(0, max_j)), c);
}

inline mf::RingElem rand_elem(int n, int c, int terms, int64_t range, int max_j, mf::Field f = {}) {
    std::vector<mf::RingElem::Term> t;
    for (int i = 0; i < terms; ++i)
        t.push_back({rand_nonneg_expvec(n, c, range, max_j), mf::Rat(rand_int(-5, 5), static_cast<unsigned long>(rand_int(1, 3)))});
    return mf::RingElem::from_terms(n, c, f, t);
}

inline mf::Rat rand_rat(int64_t range) {
    mf::Rat q(rand_int(-range, range), static_cast<unsigned long>(rand_int(1, range)));
    q.canonicalize();
    return q;
}

}  // namespace testutil
