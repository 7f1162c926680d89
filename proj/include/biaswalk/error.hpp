#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace biaswalk {

/// Pipeline stage that raised an error. Doubles as the failure class the CLI
/// maps onto its exit code.
enum class Stage : int {
  ingest = 1,
  weighting = 2,
  walk = 3,
  train = 4,
  eval = 5,
  synth = 6,
  config = 7,
};

inline std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::weighting: return "weighting";
    case Stage::walk: return "walk";
    case Stage::train: return "train";
    case Stage::eval: return "eval";
    case Stage::synth: return "synth";
    case Stage::config: return "config";
  }
  return "unknown";
}

/// Process exit code for a failure in `stage`. 0 is success, 1 is an
/// unclassified failure and 2 is reserved for command-line usage errors.
inline int exit_code(Stage stage) { return 10 + static_cast<int>(stage); }

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& what) : std::runtime_error(what), stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Malformed input line. Carries the 1-based line number and the raw line.
class ParseError : public Error {
 public:
  ParseError(Stage stage, std::size_t line, std::string text, const std::string& reason)
      : Error(stage, "line " + std::to_string(line) + ": " + reason + ": " + text),
        line_(line),
        text_(std::move(text)),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& text() const noexcept { return text_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string text_;
  std::string reason_;
};

/// Semantically invalid input: bad weights, unknown keywords, broken invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace biaswalk
