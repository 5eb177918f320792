#pragma once

#include <stdexcept>
#include <string>

namespace rotorsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state or input contained NaN/Inf. field() names the offending quantity.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(std::string field)
      : Error("non-finite value in " + field), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Invalid vehicle / scenario configuration.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what, int line = -1)
      : Error(format(field, what, line)), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& what, int line) {
    std::string s = field.empty() ? what : field + ": " + what;
    if (line >= 0) s = "line " + std::to_string(line) + ": " + s;
    return s;
  }
  std::string field_;
  int line_;
};

}  // namespace rotorsim
