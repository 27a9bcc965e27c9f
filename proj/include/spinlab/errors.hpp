#pragma once

#include <stdexcept>
#include <string>

namespace spinlab {

// Violated precondition: bad argument, wrong dimension, non-Hermitian input.
class ContractError : public std::invalid_argument {
  public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// Requested Hilbert-space dimension exceeds the configured cap.
class DimensionError : public ContractError {
  public:
    explicit DimensionError(const std::string& what) : ContractError(what) {}
};

// Iteration failed to converge or a result violated a numerical sanity bound.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spinlab
