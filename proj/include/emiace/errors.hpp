#pragma once

#include <stdexcept>
#include <string>

namespace emiace {

/// Sample whose feature vector has no direction left after normalization.
/// Callers may skip the sample.
class DegenerateSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ACE is undefined when the sample or target coincides with the mean.
class UndefinedStatisticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Background covariance could not be inverted; raise the ridge.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries file name and line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Pipeline stage failure; message is tagged with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(stage) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace emiace
