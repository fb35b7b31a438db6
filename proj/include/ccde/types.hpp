#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccde {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

using Rng = std::mt19937_64;

/// Raised for invalid user-facing configuration (unknown ids, bad sizes, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a caller breaks an API precondition (length mismatch, out-of-box point).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// splitmix64 finalizer; used to derive independent per-run seeds.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter)
{
    std::uint64_t z = master + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace ccde
