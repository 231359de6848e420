#pragma once

#include <stdexcept>
#include <string>

namespace notional {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong column count or otherwise unreadable corpus row.
class FormatError : public Error {
 public:
  using Error::Error;
};

class MalformedParseError : public Error {
 public:
  MalformedParseError(std::size_t line, const std::string& what)
      : Error("malformed parse at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MalformedCorefError : public Error {
 public:
  MalformedCorefError(int entity_id, std::size_t sentence, const std::string& what)
      : Error("malformed coreference for entity " + std::to_string(entity_id) + " in sentence " +
              std::to_string(sentence) + ": " + what),
        entity_id_(entity_id),
        sentence_(sentence) {}
  int entity_id() const { return entity_id_; }
  std::size_t sentence() const { return sentence_; }

 private:
  int entity_id_;
  std::size_t sentence_;
};

class UnmappedDocumentError : public Error {
 public:
  explicit UnmappedDocumentError(const std::string& doc_id)
      : Error("no genre prefix matches document '" + doc_id + "'"), doc_id_(doc_id) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

/// A TSV input whose header or cell contents do not match the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& column, const std::string& what)
      : Error("schema error in column '" + column + "': " + what), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

/// Feature vector or table incompatible with a fitted model's encoding.
class EncodingError : public Error {
 public:
  using Error::Error;
};

class StratificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace notional
