#pragma once

#include <stdexcept>
#include <string>

namespace fqm {

// Malformed serialized input (wire bytes or text fixtures). Never raised for
// inputs produced by the matching serializer.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A game participant broke the rules of the game (budget exceeded, challenge
// aimed at a non-honest id, ...). Distinct from losing, which is an outcome.
class GameFault : public std::runtime_error {
 public:
  explicit GameFault(const std::string& what) : std::runtime_error(what) {}
};

// Invalid experiment configuration. Always names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& why)
      : std::runtime_error("config field '" + field + "': " + why), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace fqm
