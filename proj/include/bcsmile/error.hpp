#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcsmile {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the location for diagnostics.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::string field, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": field '" + field + "': " + what),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

}  // namespace bcsmile
