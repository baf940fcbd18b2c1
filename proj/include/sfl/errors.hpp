#pragma once

#include <exception>
#include <stdexcept>
#include <string>

namespace sfl {

// Exit codes reported by the CLI. Library errors map onto these by type.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitDomain = 4;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value outside its documented domain (alpha, indices, counts).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid configuration (inconsistent topology, bad parameter set).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; message carries "path:line:" where known.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit cannot produce a model (underdetermined or ill-conditioned design).
class FitError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A convex RS model was required but a2 <= 0.
class NonConvexModelError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Energy budget below the minimum achievable energy; carries that minimum.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& message, double min_energy_j)
      : Error(message), min_energy_j_(min_energy_j) {}

  double min_achievable_energy_j() const { return min_energy_j_; }

 private:
  double min_energy_j_;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) != nullptr) return kExitParse;
  if (dynamic_cast<const InfeasibleError*>(&e) != nullptr) return kExitInfeasible;
  if (dynamic_cast<const DomainError*>(&e) != nullptr) return kExitDomain;
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitDomain;
  return kExitInternal;
}

}  // namespace sfl
