#ifndef RSDESIGN_ERRORS_HPP
#define RSDESIGN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rsdesign {

/// Malformed or inconsistent user configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No design reachable by the search makes the criterion defined.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request that the design cannot honor, e.g. interval graphs with no
/// pure-error degrees of freedom.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsdesign

#endif  // RSDESIGN_ERRORS_HPP
