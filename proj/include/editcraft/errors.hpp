#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace editcraft {

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SMILES / wire-format syntax problem, with the byte offset that caused it.
class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Legal SMILES (or profile) feature that this artifact deliberately rejects.
class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

class DuplicateMapNumber : public Error {
 public:
  explicit DuplicateMapNumber(int map_num)
      : Error("duplicate atom map number " + std::to_string(map_num)),
        map_num_(map_num) {}

  int map_num() const { return map_num_; }

 private:
  int map_num_;
};

class UnknownAtomError : public Error {
 public:
  explicit UnknownAtomError(int map_num)
      : Error("no atom with map number " + std::to_string(map_num)),
        map_num_(map_num) {}

  int map_num() const { return map_num_; }

 private:
  int map_num_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Line-oriented file (JSONL, TSV) with a bad record.
class SchemaError : public Error {
 public:
  SchemaError(std::string message, std::size_t line, std::string field)
      : Error("line " + std::to_string(line) + ": " + message +
              (field.empty() ? "" : " (field '" + field + "')")),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace editcraft
