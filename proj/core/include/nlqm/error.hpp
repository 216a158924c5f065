#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace nlqm {

namespace detail {
// Three significant digits in exponent form, for diagnostics.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}  // namespace detail

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: grid bounds, unknown names, parameter domains, syntax.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ConfigError("parse error at column " + std::to_string(position + 1) +
                    ": " + what),
        position_(position) {}

  /// Zero-based character offset into the source text.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A numeric precondition failed while evaluating or integrating.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Pointwise evaluation failure (division by zero, ln of a non-positive value).
class EvalError : public NumericError {
 public:
  EvalError(const std::string& what, std::size_t node)
      : NumericError(what + " at node " + std::to_string(node)), node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// rho fell below the floor at a node inside the support of the state.
class AmplitudeUnderflow : public NumericError {
 public:
  AmplitudeUnderflow(std::size_t node, double rho)
      : NumericError("amplitude underflow at interior node " +
                     std::to_string(node) + " (rho = " + detail::sci(rho) +
                     ")"),
        node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class DecayViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace nlqm
