#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetlab {

// Parse failure with the byte offset where the scan stopped and a short
// description of what was expected there.
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(std::size_t offset, std::string expected)
      : std::runtime_error("syntax error at offset " + std::to_string(offset) +
                           ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownVariable : public std::runtime_error {
public:
  explicit UnknownVariable(std::string name)
      : std::runtime_error("unknown variable '" + name + "'"),
        name_(std::move(name)) {}

  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularMetric : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateGrid : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class LineSearchFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidOrder : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonConstantBase : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NonSkew : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace jetlab
