#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace labelvar {

// Root of the library's exception hierarchy. The CLI and the HTTP service map
// the concrete subclasses onto exit codes and status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownColumnError : public Error {
 public:
  UnknownColumnError(std::string name, std::string nearest);

  const std::string& name() const { return name_; }
  const std::string& nearest() const { return nearest_; }

 private:
  std::string name_;
  std::string nearest_;
};

// A dataset, column, or argument violates a structural invariant.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Reading or parsing an input file failed.
class LoadError : public Error {
 public:
  explicit LoadError(std::string message, std::optional<std::size_t> line = {},
                     std::string column = {}, std::string value = {});

  std::optional<std::size_t> line() const { return line_; }
  const std::string& column() const { return column_; }
  const std::string& value() const { return value_; }

 private:
  std::optional<std::size_t> line_;
  std::string column_;
  std::string value_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, std::string found);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string found_;
};

// Statistics requested on inputs that cannot support them (zero variance, too
// few pairs).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InfeasibleSpecError : public Error {
 public:
  using Error::Error;
};

class SelectionMismatchError : public Error {
 public:
  using Error::Error;
};

// Closest candidate by edit distance, or empty when there are no candidates.
std::string nearest_name(const std::string& name, const std::vector<std::string>& candidates);

}  // namespace labelvar
