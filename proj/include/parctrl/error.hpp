#pragma once

#include <stdexcept>
#include <string>

namespace parctrl {

/// Input or precondition rejected (bad sizes, bad config, violated hypothesis).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical kernel failed: factorization, eigensolver or iteration cap.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

#define PARCTRL_REQUIRE(cond, msg)                                    \
    do {                                                              \
        if (!(cond)) throw ::parctrl::ValidationError(msg);           \
    } while (0)

} // namespace parctrl
