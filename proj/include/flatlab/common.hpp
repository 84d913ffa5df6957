#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace flatlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Numerical tolerances shared by every module.
namespace tol {
/// Slack for identities that hold exactly in exact arithmetic.
inline constexpr double kIdentity = 1e-9;
/// Slack added to the right-hand side of inequality checks.
inline constexpr double kInequality = 1e-8;
/// Determinant of an orthogonal matrix must be within this of +-1.
inline constexpr double kDeterminant = 1e-6;
/// A homogeneous coordinate at or below this magnitude is "at infinity".
inline constexpr double kAtInfinity = 1e-7;
}  // namespace tol

/// Largest ambient dimension supported by the dense linear algebra paths.
inline constexpr int kMaxAmbientDim = 16;

/// Invalid arguments or violated preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A projective map sends the requested object to the hyperplane at infinity.
class MapsToInfinityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Hyperplane with no graph form {y_n = <a, y'> + c}.
class VerticalHyperplaneError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Search or experiment exceeded its configured budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A result that is a theorem (or an implementation contract) failed to hold.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// SplitMix64 step; used to derive independent per-shard seeds.
inline Seed derive_seed(Seed base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError(what);
}

}  // namespace flatlab
