#pragma once

#include <stdexcept>
#include <string>

namespace emtm {

// Bad input: configs, parameters, physically inconsistent waves. CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Momentum outside the open disk |p| < k.
class DomainError : public ValidationError {
public:
    explicit DomainError(const std::string& what) : ValidationError(what) {}
};

// Failure during a numerical computation. CLI exit code 3.
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

// M22 not invertible on its range, or the point-scatterer pole.
class SpectralSingularity : public ComputationError {
public:
    explicit SpectralSingularity(const std::string& what) : ComputationError(what) {}
};

}  // namespace emtm
