#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace centrinet {

/// Invalid configuration value or combination.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside an operation's domain.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but mathematically unusable (e.g. a disconnected graph
/// handed to information centrality).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Broken invariant inside the simulator. Aborts the run.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace centrinet
