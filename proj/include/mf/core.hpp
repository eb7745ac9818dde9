#pragma once
// Shared scalar types and the error hierarchy.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mf {

using Int = mpz_class;
using Rat = mpq_class;
using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;  // row-major

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (CLI exit code 2).
struct PreconditionError : Error {
    using Error::Error;
};

// Parse failures are reported like precondition failures.
struct ParseError : PreconditionError {
    using PreconditionError::PreconditionError;
};

// An iteration or depth budget ran out (CLI exit code 3).
struct BudgetExceeded : Error {
    using Error::Error;
};

// A produced certificate failed re-verification (CLI exit code 4).
struct VerificationError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw PreconditionError(msg);
}

std::string to_string(const Rat& q);
std::string to_string(const QVec& v);
Rat parse_rat(std::string_view s);

Int floor_rat(const Rat& q);
Int ceil_rat(const Rat& q);
// smallest integer m >= 0 with m*m >= q (q >= 0)
Int ceil_sqrt(const Rat& q);
Int ipow(const Int& b, unsigned long e);

}  // namespace mf
