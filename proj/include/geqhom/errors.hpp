#pragma once

#include <stdexcept>
#include <string>

namespace geqhom {

/// Precondition violated by the caller (bad spec, bad grid, bad argument).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The computational box cannot certify the requested travel times; the
/// caller must enlarge the grid. Never silently truncated.
class GridTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical quantity came out non-finite or otherwise unusable. The
/// message carries the witness (point pair, seed, ...).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration failed to parse or validate. `where` names the
/// offending field (JSON pointer) or line.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::invalid_argument(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace geqhom
