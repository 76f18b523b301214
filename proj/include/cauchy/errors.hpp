#pragma once

#include <stdexcept>
#include <string>

namespace cauchy {

/// Violated precondition or malformed input. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to deliver its contract. Maps to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double achieved = 0.0)
        : std::runtime_error(what), achieved_(achieved) {}

    /// Achieved residual or condition estimate, depending on the source.
    [[nodiscard]] double achieved() const { return achieved_; }

private:
    double achieved_;
};

}  // namespace cauchy
