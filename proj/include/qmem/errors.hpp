#pragma once

#include <stdexcept>
#include <string>

namespace qmem {

// Thrown when an adaptive quadrature or transform cannot reach the requested
// tolerance. Carries the error estimate that was actually achieved.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate: " +
                             std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

} // namespace qmem
