#include "mf/core.hpp"

#include <cctype>

namespace mf {

std::string to_string(const Rat& q) {
    return q.get_str();
}

std::string to_string(const QVec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].get_str();
    }
    return s + ")";
}

Rat parse_rat(std::string_view s) {
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw ParseError("empty rational");
    if (t[0] == '+') t.erase(0, 1);
    for (size_t i = 0; i < t.size(); ++i) {
        char ch = t[i];
        bool ok = std::isdigit(static_cast<unsigned char>(ch)) || ch == '/' || (ch == '-' && i == 0);
        if (!ok) throw ParseError("bad rational '" + std::string(s) + "'");
    }
    Rat q;
    if (q.set_str(t, 10) != 0) throw ParseError("bad rational '" + std::string(s) + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    q.canonicalize();
    return q;
}

Int floor_rat(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Int ceil_rat(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Int ceil_sqrt(const Rat& q) {
    if (q <= 0) return 0;
    Int c = ceil_rat(q);
    Int r;
    mpz_sqrt(r.get_mpz_t(), c.get_mpz_t());
    while (Rat(r * r) < q) ++r;
    while (r > 0 && Rat((r - 1) * (r - 1)) >= q) --r;
    return r;
}

Int ipow(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

}  // namespace mf
