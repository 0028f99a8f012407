#pragma once

#include <stdexcept>
#include <string>

namespace sturm {

// Exit codes used by the CLI; library errors carry the code they map to.
enum class ExitCode : int {
  ok = 0,
  acceptance_failure = 1,
  config = 2,
  precision = 3,
  resource = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Invalid parameters, malformed input, depth/level preconditions.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(ExitCode::config, msg) {}
};

// A query word is not a factor of the infinite word under study.
class MembershipError : public ConfigError {
 public:
  explicit MembershipError(const std::string& msg) : ConfigError(msg) {}
};

// A partition level is too coarse for the word (the word sits inside one block).
class LevelError : public ConfigError {
 public:
  explicit LevelError(const std::string& msg) : ConfigError(msg) {}
};

// Exact arithmetic could not decide a boundary case at the stored expansion depth.
class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& msg) : Error(ExitCode::precision, msg) {}
};

// A requested object exceeds the configured memory/length budget.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& msg) : Error(ExitCode::resource, msg) {}
};

// A postcondition the implementation guarantees failed; always a bug.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& msg) : Error(ExitCode::internal, msg) {}
};

}  // namespace sturm
