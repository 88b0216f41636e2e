#pragma once

#include <stdexcept>
#include <string>

namespace spinchain {

// Input documents that do not match the expected layout.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input violating a physical invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotDiagonalError : ValidationError {
    explicit NotDiagonalError(const std::string& msg) : ValidationError(msg) {}
};

struct OddLengthError : ValidationError {
    explicit OddLengthError(const std::string& msg) : ValidationError(msg) {}
};

struct NotPeriodicError : ValidationError {
    explicit NotPeriodicError(const std::string& msg) : ValidationError(msg) {}
};

struct DimensionError : ValidationError {
    explicit DimensionError(const std::string& msg) : ValidationError(msg) {}
};

struct LengthError : ValidationError {
    explicit LengthError(const std::string& msg) : ValidationError(msg) {}
};

struct RangeError : ValidationError {
    explicit RangeError(const std::string& msg) : ValidationError(msg) {}
};

struct NormError : ValidationError {
    explicit NormError(const std::string& msg) : ValidationError(msg) {}
};

struct BoundaryError : ValidationError {
    explicit BoundaryError(const std::string& msg) : ValidationError(msg) {}
};

struct PreconditionError : ValidationError {
    explicit PreconditionError(const std::string& msg) : ValidationError(msg) {}
};

// Requested computation exceeds a configured resource ceiling.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeError : BudgetError {
    explicit SizeError(const std::string& msg) : BudgetError(msg) {}
};

struct EmptyNetError : std::runtime_error {
    explicit EmptyNetError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinchain
