#include "mf/linalg.hpp"

#include <algorithm>

namespace mf {

Rat dot(const QVec& a, const QVec& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
}

QVec add(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

QVec sub(const QVec& a, const QVec& b) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

QVec scale(const QVec& a, const Rat& k) {
    QVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * k;
    return r;
}

bool is_zero(const QVec& a) {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

std::vector<int> rref(QMat& A) {
    std::vector<int> piv;
    if (A.empty()) return piv;
    int m = static_cast<int>(A.size()), n = static_cast<int>(A[0].size());
    int r = 0;
    for (int col = 0; col < n && r < m; ++col) {
        int p = -1;
        for (int i = r; i < m; ++i)
            if (A[i][col] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(A[r], A[p]);
        Rat inv = 1 / A[r][col];
        for (int k = col; k < n; ++k) A[r][k] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r || A[i][col] == 0) continue;
            Rat f = A[i][col];
            for (int k = col; k < n; ++k)
                if (A[r][k] != 0) A[i][k] -= f * A[r][k];
        }
        piv.push_back(col);
        ++r;
    }
    return piv;
}

int rank(QMat A) {
    return static_cast<int>(rref(A).size());
}

QMat nullspace(const QMat& A, int ncols) {
    QMat R = A;
    auto piv = rref(R);
    std::vector<bool> is_piv(ncols, false);
    for (int p : piv) is_piv[p] = true;
    QMat basis;
    for (int f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        QVec x(ncols, Rat(0));
        x[f] = 1;
        for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = -R[r][f];
        basis.push_back(x);
    }
    return basis;
}

std::optional<QVec> solve(const QMat& A, const QVec& b) {
    int m = static_cast<int>(A.size());
    if (m == 0) return QVec{};
    int n = static_cast<int>(A[0].size());
    QMat Aug = A;
    for (int i = 0; i < m; ++i) Aug[i].push_back(b[i]);
    auto piv = rref(Aug);
    if (!piv.empty() && piv.back() == n) return std::nullopt;
    QVec x(n, Rat(0));
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = Aug[r][n];
    return x;
}

Rat det(QMat A) {
    int n = static_cast<int>(A.size());
    Rat d = 1;
    for (int col = 0; col < n; ++col) {
        int p = -1;
        for (int i = col; i < n; ++i)
            if (A[i][col] != 0) {
                p = i;
                break;
            }
        if (p < 0) return 0;
        if (p != col) {
            std::swap(A[p], A[col]);
            d = -d;
        }
        d *= A[col][col];
        for (int i = col + 1; i < n; ++i) {
            if (A[i][col] == 0) continue;
            Rat f = A[i][col] / A[col][col];
            for (int k = col; k < n; ++k) A[i][k] -= f * A[col][k];
        }
    }
    return d;
}

std::optional<QMat> inverse(const QMat& A) {
    int n = static_cast<int>(A.size());
    QMat Aug(n, QVec(2 * n, Rat(0)));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) Aug[i][k] = A[i][k];
        Aug[i][n + i] = 1;
    }
    auto piv = rref(Aug);
    if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
    QMat inv(n, QVec(n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) inv[i][k] = Aug[i][n + k];
    return inv;
}

QMat transpose(const QMat& A) {
    if (A.empty()) return {};
    QMat T(A[0].size(), QVec(A.size()));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t k = 0; k < A[0].size(); ++k) T[k][i] = A[i][k];
    return T;
}

QMat matmul(const QMat& A, const QMat& B) {
    size_t m = A.size(), n = B.empty() ? 0 : B[0].size(), l = B.size();
    QMat C(m, QVec(n, Rat(0)));
    for (size_t i = 0; i < m; ++i)
        for (size_t k = 0; k < l; ++k) {
            if (A[i][k] == 0) continue;
            for (size_t j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
        }
    return C;
}

QVec matvec(const QMat& A, const QVec& x) {
    QVec r(A.size(), Rat(0));
    for (size_t i = 0; i < A.size(); ++i) r[i] = dot(A[i], x);
    return r;
}

std::vector<int> independent_rows(const QMat& A) {
    std::vector<int> idx;
    QMat acc;
    for (size_t i = 0; i < A.size(); ++i) {
        acc.push_back(A[i]);
        if (rank(acc) == static_cast<int>(acc.size()))
            idx.push_back(static_cast<int>(i));
        else
            acc.pop_back();
    }
    return idx;
}

std::vector<ElemOp> elementary_factor_sl(QMat T) {
    int k = static_cast<int>(T.size());
    if (det(T) != 1) throw PreconditionError("elementary_factor_sl: determinant is not 1");
    std::vector<ElemOp> left;  // E_m ... E_1 T = 1, E_s = e_{ij}(q) acting as row_i += q row_j
    auto rowop = [&](int i, int j, const Rat& q) {
        if (q == 0) return;
        for (int c = 0; c < k; ++c) T[i][c] += q * T[j][c];
        left.push_back({i, j, q});
    };
    for (int i = 0; i < k; ++i) {
        if (i < k - 1) {
            if (T[i + 1][i] == 0) {
                int l = -1;
                for (int r = i; r < k; ++r)
                    if (T[r][i] != 0) {
                        l = r;
                        break;
                    }
                if (l < 0) throw Error("elementary_factor_sl: singular column");
                rowop(i + 1, l, Rat(1));
            }
            if (T[i][i] != 1) rowop(i, i + 1, (1 - T[i][i]) / T[i + 1][i]);
        }
        for (int r = 0; r < k; ++r)
            if (r != i && T[r][i] != 0) rowop(r, i, -T[r][i]);
    }
    // T = E_1^{-1} E_2^{-1} ... E_m^{-1}
    for (auto& op : left) op.q = -op.q;
    return left;
}

QMat eval_elem_ops(const std::vector<ElemOp>& ops, int k) {
    QMat M(k, QVec(k, Rat(0)));
    for (int i = 0; i < k; ++i) M[i][i] = 1;
    for (const auto& op : ops)
        // right-multiply by e_{ij}(q): column j += q column i
        for (int r = 0; r < k; ++r) M[r][op.j] += op.q * M[r][op.i];
    return M;
}

QVec primitive(const QVec& v) {
    Int l = 1;
    for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    ZVec z;
    for (const auto& x : v) z.push_back(Int(x * Rat(l)));
    Int g = gcd_all(z);
    QVec r;
    for (auto& x : z) r.push_back(g == 0 ? Rat(0) : Rat(x / g));
    return r;
}

Int gcd_all(const ZVec& v) {
    Int g = 0;
    for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    return g;
}

ZMat hnf_basis(ZMat A) {
    if (A.empty()) return {};
    size_t m = A.size(), n = A[0].size();
    size_t r = 0;
    for (size_t col = 0; col < n && r < m; ++col) {
        // Euclid on column col among rows r..m-1
        for (;;) {
            size_t p = m;
            for (size_t i = r; i < m; ++i)
                if (A[i][col] != 0 && (p == m || abs(A[i][col]) < abs(A[p][col]))) p = i;
            if (p == m) break;
            std::swap(A[r], A[p]);
            bool done = true;
            for (size_t i = r + 1; i < m; ++i) {
                if (A[i][col] == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), A[i][col].get_mpz_t(), A[r][col].get_mpz_t());
                for (size_t k = col; k < n; ++k) A[i][k] -= q * A[r][k];
                if (A[i][col] != 0) done = false;
            }
            if (done) break;
        }
        if (A[r][col] == 0) continue;
        if (A[r][col] < 0)
            for (size_t k = col; k < n; ++k) A[r][k] = -A[r][k];
        for (size_t i = 0; i < r; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), A[i][col].get_mpz_t(), A[r][col].get_mpz_t());
            if (q != 0)
                for (size_t k = col; k < n; ++k) A[i][k] -= q * A[r][k];
        }
        ++r;
    }
    A.resize(r);
    return A;
}

std::optional<ZVec> lattice_coords(const ZMat& basis, const ZVec& v) {
    if (basis.empty()) {
        for (const auto& x : v)
            if (x != 0) return std::nullopt;
        return ZVec{};
    }
    // rational solve of x * B = v, then integrality check
    QMat BT(basis[0].size(), QVec(basis.size()));
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t k = 0; k < basis[0].size(); ++k) BT[k][i] = Rat(basis[i][k]);
    QVec b;
    for (const auto& x : v) b.push_back(Rat(x));
    auto x = solve(BT, b);
    if (!x) return std::nullopt;
    ZVec z;
    for (auto& q : *x) {
        if (q.get_den() != 1) return std::nullopt;
        z.push_back(q.get_num());
    }
    return z;
}

Int zdet(const ZMat& A) {
    QMat Q(A.size(), QVec(A.size()));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t k = 0; k < A.size(); ++k) Q[i][k] = Rat(A[i][k]);
    Rat d = det(Q);
    return d.get_num();
}

QVec to_qvec(const ZVec& v) {
    QVec q;
    for (const auto& x : v) q.push_back(Rat(x));
    return q;
}

}  // namespace mf
