#pragma once

#include <stdexcept>
#include <string>

namespace fairwrite {

/// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,  // bad vectors, dimension mismatch, malformed input data
  kDegenerate,       // repair vector undefined (response parallel to w-)
  kNotFound,         // unknown group/attribute/text
  kValidation,       // lexicon or dataset invariant violated
  kConfig,           // unusable configuration
  kProvider,         // embedding/chat/classifier backend failure
  kUndefined,        // metric undefined for the given data
  kEvalFailed,       // batch run exceeded its error budget
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::kInvalidArgument, what) {}
};

class DegenerateRepair : public Error {
 public:
  explicit DegenerateRepair(const std::string& what) : Error(ErrorKind::kDegenerate, what) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& what) : Error(ErrorKind::kNotFound, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::kValidation, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, bool transient = false)
      : Error(ErrorKind::kProvider, what), transient_(transient) {}

  // Timeouts, 429 and 5xx are transient; everything else is final.
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& what) : Error(ErrorKind::kUndefined, what) {}
};

class EvalFailed : public Error {
 public:
  explicit EvalFailed(const std::string& what) : Error(ErrorKind::kEvalFailed, what) {}
};

}  // namespace fairwrite
