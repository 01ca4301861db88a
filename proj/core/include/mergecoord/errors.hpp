#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mergecoord {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Polyline/network construction violations, out-of-range stations,
// invalid geographic degrees.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  enum class Kind { Truncated, UnknownTag, MalformedPayload, BadHeading };

  DecodeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class EmptyBuffer : public Error {
 public:
  EmptyBuffer() : Error("trajectory buffer is empty") {}
};

class InsufficientSamples : public Error {
 public:
  InsufficientSamples() : Error("need at least 2 samples to estimate motion") {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("merging order needs at least one ETA") {}
};

class WrongPhase : public Error {
 public:
  using Error::Error;
};

class IllegalTransition : public Error {
 public:
  using Error::Error;
};

class NotInPlan : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public Error {
 public:
  explicit UnknownPreset(const std::string& id)
      : Error("unknown preset: " + id) {}
};

// Scenario/trace text errors. Syntax errors carry the offending line.
class ScenarioError : public Error {
 public:
  enum class Kind { Syntax, Semantic };

  ScenarioError(Kind kind, const std::string& what,
                std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what),
        kind_(kind),
        line_(line) {}

  Kind kind() const { return kind_; }
  std::optional<std::size_t> line() const { return line_; }

 private:
  Kind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace mergecoord
