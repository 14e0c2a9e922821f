#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hopfian {

// Base class for every error this library raises on purpose, so callers can
// catch library failures separately from std::logic_error style bugs.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& msg) : Error("integer overflow: " + msg) {}
};

// Raised when an endomorphism enumeration would exceed the configured budget.
struct BudgetExceeded : Error {
    long long total;  // |End(G)|, saturated at LLONG_MAX when it does not fit
    explicit BudgetExceeded(long long total_)
        : Error("endomorphism count " + std::to_string(total_) + " exceeds budget"),
          total(total_) {}
};

// Raised when a kernel chain fails to stabilize within the iteration cap.
struct CapExceeded : Error {
    long long cap;
    explicit CapExceeded(long long cap_)
        : Error("kernel chain did not stabilize within " + std::to_string(cap_) + " steps"),
          cap(cap_) {}
};

struct UnboundedAtAPrime : Error {
    long long prime;
    explicit UnboundedAtAPrime(long long prime_)
        : Error("torsion at prime " + std::to_string(prime_) + " is infinite"),
          prime(prime_) {}
};

struct NotReduced : Error {
    explicit NotReduced(const std::string& msg) : Error("group is not reduced: " + msg) {}
};

struct NotACharacteristic : Error {
    explicit NotACharacteristic(const std::string& msg)
        : Error("matrix is not a torsion-free characteristic: " + msg) {}
};

struct NotWarfieldShape : Error {
    explicit NotWarfieldShape(const std::string& msg)
        : Error("descriptor is outside the supported direct-sum shape: " + msg) {}
};

struct CaseMismatch : Error {
    explicit CaseMismatch(const std::string& msg)
        : Error("case endomorphism not applicable: " + msg) {}
};

struct NoWitness : Error {
    explicit NoWitness(const std::string& msg) : Error("no chain witness: " + msg) {}
};

// A verdict and its oracle evidence disagree.  This is a genuine failure.
struct Inconsistent : Error {
    explicit Inconsistent(const std::string& msg) : Error("oracle inconsistency: " + msg) {}
};

// Two classification rules derived opposite verdicts for the same field.
struct Contradiction : Error {
    explicit Contradiction(const std::string& msg) : Error("rule contradiction: " + msg) {}
};

struct ParseError : Error {
    std::string where;  // JSON pointer-ish location
    ParseError(const std::string& where_, const std::string& msg)
        : Error("parse error at " + (where_.empty() ? std::string("/") : where_) + ": " + msg),
          where(where_) {}
};

struct ValidationError : Error {
    std::vector<std::string> violations;
    explicit ValidationError(std::vector<std::string> violations_)
        : Error("descriptor failed validation (" + std::to_string(violations_.size()) +
                " violation(s), first: " + (violations_.empty() ? "?" : violations_.front()) + ")"),
          violations(std::move(violations_)) {}
};

}  // namespace hopfian
