#include "mf/lattice.hpp"

#include <cctype>
#include <sstream>

namespace mf {

int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error("exponent overflow in addition");
    return r;
}

int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error("exponent overflow in multiplication");
    return r;
}

int64_t checked_pow(int64_t b, int e) {
    int64_t r = 1;
    for (int i = 0; i < e; ++i) r = checked_mul(r, b);
    return r;
}

ExpVec::ExpVec(const std::vector<int64_t>& num, int j, int c) {
    if (num.empty() || num.size() > static_cast<size_t>(kMaxDim))
        throw PreconditionError("ExpVec dimension must be in 1.." + std::to_string(kMaxDim));
    if (c < 2) throw PreconditionError("ExpVec base must be >= 2");
    if (j < 0) throw PreconditionError("ExpVec denominator power must be >= 0");
    n_ = static_cast<int16_t>(num.size());
    j_ = static_cast<int16_t>(j);
    c_ = c;
    for (int i = 0; i < n_; ++i) num_[i] = num[i];
    canonicalize();
}

ExpVec ExpVec::zero(int n, int c) {
    return ExpVec(std::vector<int64_t>(n, 0), 0, c);
}

ExpVec ExpVec::unit(int n, int i, int c) {
    std::vector<int64_t> v(n, 0);
    v.at(i) = 1;
    return ExpVec(v, 0, c);
}

ExpVec ExpVec::from_qvec(const QVec& v, int c) {
    // find smallest j with c^j * v integral
    Int cj = 1;
    int j = 0;
    for (;;) {
        bool ok = true;
        for (const auto& x : v) {
            Rat y = x * Rat(cj);
            if (y.get_den() != 1) {
                ok = false;
                break;
            }
        }
        if (ok) break;
        ++j;
        cj *= c;
        if (j > 62) throw PreconditionError("coordinate denominator is not a power of " + std::to_string(c));
    }
    std::vector<int64_t> num;
    for (const auto& x : v) {
        Int y = Int(x * Rat(cj));
        if (!y.fits_slong_p()) throw Error("exponent overflow");
        num.push_back(y.get_si());
    }
    return ExpVec(num, j, c);
}

void ExpVec::canonicalize() {
    bool zero = true;
    for (int i = 0; i < n_; ++i)
        if (num_[i] != 0) zero = false;
    if (zero) {
        j_ = 0;
        return;
    }
    while (j_ > 0) {
        for (int i = 0; i < n_; ++i)
            if (num_[i] % c_ != 0) return;
        for (int i = 0; i < n_; ++i) num_[i] /= c_;
        --j_;
    }
}

void ExpVec::check_compat(const ExpVec& o) const {
    if (n_ != o.n_) throw PreconditionError("ExpVec dimension mismatch");
    if (c_ != o.c_) throw PreconditionError("ExpVec base mismatch");
}

std::vector<int64_t> ExpVec::numerators() const {
    return std::vector<int64_t>(num_.begin(), num_.begin() + n_);
}

std::vector<int64_t> ExpVec::numerators_at(int j) const {
    if (j < j_) throw PreconditionError("numerators_at: level below denominator power");
    int64_t f = checked_pow(c_, j - j_);
    std::vector<int64_t> r(n_);
    for (int i = 0; i < n_; ++i) r[i] = checked_mul(num_[i], f);
    return r;
}

Rat ExpVec::coord(int i) const {
    Rat q(Int(static_cast<long>(num_[i])), ipow(c_, j_));
    q.canonicalize();
    return q;
}

QVec ExpVec::to_qvec() const {
    QVec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = coord(i);
    return v;
}

bool ExpVec::is_zero() const {
    for (int i = 0; i < n_; ++i)
        if (num_[i] != 0) return false;
    return true;
}

ExpVec ExpVec::operator+(const ExpVec& o) const {
    check_compat(o);
    int j = std::max(j_, o.j_);
    auto a = numerators_at(j), b = o.numerators_at(j);
    for (int i = 0; i < n_; ++i) a[i] = checked_add(a[i], b[i]);
    return ExpVec(a, j, c_);
}

ExpVec ExpVec::operator-() const {
    ExpVec r = *this;
    for (int i = 0; i < n_; ++i) r.num_[i] = -r.num_[i];
    return r;
}

ExpVec ExpVec::operator-(const ExpVec& o) const {
    return *this + (-o);
}

ExpVec ExpVec::scaled(int64_t k) const {
    std::vector<int64_t> a(n_);
    for (int i = 0; i < n_; ++i) a[i] = checked_mul(num_[i], k);
    return ExpVec(a, j_, c_);
}

bool ExpVec::operator==(const ExpVec& o) const {
    if (n_ != o.n_ || c_ != o.c_ || j_ != o.j_) return false;
    for (int i = 0; i < n_; ++i)
        if (num_[i] != o.num_[i]) return false;
    return true;
}

bool ExpVec::operator<(const ExpVec& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (c_ != o.c_) return c_ < o.c_;
    int j = std::max(j_, o.j_);
    auto a = numerators_at(j), b = o.numerators_at(j);
    __int128 sa = 0, sb = 0;
    for (int i = 0; i < n_; ++i) {
        sa += a[i];
        sb += b[i];
    }
    if (sa != sb) return sa < sb;
    for (int i = 0; i < n_; ++i)
        if (a[i] != b[i]) return a[i] > b[i];
    return false;
}

size_t ExpVec::hash() const {
    size_t h = static_cast<size_t>(j_) * 0x9e3779b97f4a7c15ULL ^ static_cast<size_t>(c_);
    for (int i = 0; i < n_; ++i) {
        h ^= static_cast<size_t>(num_[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

std::string ExpVec::str() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < n_; ++i) {
        if (i) os << ",";
        os << num_[i];
    }
    os << ")";
    if (j_ > 0) os << "/" << c_ << "^" << j_;
    return os.str();
}

ExpVec expvec_add(const ExpVec& u, const ExpVec& v) {
    return u + v;
}

ExpVec frobenius_exp(const ExpVec& u, int j) {
    if (j >= 0) return u.scaled(checked_pow(u.base(), j));
    return ExpVec(u.numerators(), u.denom_pow() - j, u.base());
}

Rat nth_coord(const ExpVec& u) {
    return u.coord(u.dim() - 1);
}

Rat sq_norm(const ExpVec& u) {
    Rat s = 0;
    for (int i = 0; i < u.dim(); ++i) {
        Int x(static_cast<long>(u.num(i)));
        s += Rat(x * x);
    }
    return s / Rat(ipow(u.base(), 2 * u.denom_pow()));
}

Rat inner(const ExpVec& u, const ExpVec& v) {
    Rat s = 0;
    for (int i = 0; i < u.dim(); ++i) s += u.coord(i) * v.coord(i);
    return s;
}

Rat eval(const QVec& f, const ExpVec& u) {
    Rat s = 0;
    for (int i = 0; i < u.dim(); ++i)
        if (f[i] != 0 && u.num(i) != 0) s += f[i] * u.coord(i);
    return s;
}

static std::string strip_ws(std::string_view s) {
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    return t;
}

ExpVec parse_expvec(std::string_view in, int c) {
    std::string s = strip_ws(in);
    if (s.empty() || s[0] != '(') throw ParseError("exponent vector must start with '(': " + s);
    auto close = s.find(')');
    if (close == std::string::npos) throw ParseError("unterminated exponent vector: " + s);
    std::string body = s.substr(1, close - 1);
    std::string tail = s.substr(close + 1);
    QVec coords;
    size_t pos = 0;
    while (pos <= body.size()) {
        auto comma = body.find(',', pos);
        if (comma == std::string::npos) comma = body.size();
        coords.push_back(parse_rat(body.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (!tail.empty()) {
        // "/c^j"
        if (tail[0] != '/') throw ParseError("bad exponent vector suffix: " + tail);
        auto caret = tail.find('^');
        if (caret == std::string::npos) throw ParseError("expected /c^j suffix: " + tail);
        long base = std::stol(tail.substr(1, caret - 1));
        long j = std::stol(tail.substr(caret + 1));
        if (base != c) throw ParseError("exponent vector base " + std::to_string(base) + " differs from c=" + std::to_string(c));
        if (j < 0) throw ParseError("negative denominator power");
        Rat d(ipow(c, static_cast<unsigned long>(j)));
        for (auto& x : coords) x /= d;
    }
    return ExpVec::from_qvec(coords, c);
}

Rat Hyperplane::value(const QVec& x) const {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
}

Rat Hyperplane::value(const ExpVec& u) const {
    return eval(a, u);
}

std::string Hyperplane::str() const {
    std::string s;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        if (!s.empty() && a[i] > 0) s += "+";
        if (a[i] == -1)
            s += "-";
        else if (a[i] != 1)
            s += a[i].get_str();
        s += "x" + std::to_string(i + 1);
    }
    if (s.empty()) s = "0";
    return s + "=" + level.get_str();
}

Hyperplane parse_hyperplane(std::string_view in, int n) {
    std::string s = strip_ws(in);
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("hyperplane needs '=': " + s);
    std::string lhs = s.substr(0, eq), rhs = s.substr(eq + 1);
    Hyperplane H;
    H.a.assign(n, Rat(0));
    H.level = parse_rat(rhs);
    size_t pos = 0;
    if (lhs.empty()) throw ParseError("empty hyperplane functional");
    while (pos < lhs.size()) {
        size_t start = pos;
        if (lhs[pos] == '+' || lhs[pos] == '-') ++pos;
        while (pos < lhs.size() && lhs[pos] != 'x') ++pos;
        if (pos >= lhs.size()) throw ParseError("expected variable in hyperplane: " + s);
        std::string coef = lhs.substr(start, pos - start);
        ++pos;
        size_t vs = pos;
        while (pos < lhs.size() && std::isdigit(static_cast<unsigned char>(lhs[pos]))) ++pos;
        if (vs == pos) throw ParseError("expected variable index in hyperplane: " + s);
        int idx = std::stoi(lhs.substr(vs, pos - vs));
        if (idx < 1 || idx > n) throw ParseError("variable index out of range in hyperplane: " + s);
        Rat k;
        if (coef.empty() || coef == "+")
            k = 1;
        else if (coef == "-")
            k = -1;
        else
            k = parse_rat(coef);
        H.a[idx - 1] += k;
    }
    return H;
}

std::optional<QVec> phi_image(const QVec& u, const Hyperplane& G) {
    bool zero = true;
    for (const auto& x : u)
        if (x != 0) zero = false;
    if (zero) throw PreconditionError("phi_image of the zero vector");
    if (G.level == 0) throw PreconditionError("phi_image: hyperplane passes through the origin");
    Rat g = G.value(u);
    if (g == 0 || sgn(g) != sgn(G.level)) return std::nullopt;
    Rat t = G.level / g;
    QVec p(u.size());
    for (size_t i = 0; i < u.size(); ++i) p[i] = u[i] * t;
    return p;
}

std::optional<QVec> phi_image(const ExpVec& u, const Hyperplane& G) {
    return phi_image(u.to_qvec(), G);
}

}  // namespace mf
