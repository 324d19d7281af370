#pragma once

#include <stdexcept>
#include <string>

namespace mrm {

// File missing or unreadable.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input content. Messages carry file:line or byte offset.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid byte sequence for the fixed UTF-8 encoding.
class EncodingError : public FormatError {
public:
  using FormatError::FormatError;
};

// Value outside an operation's contract (negative score, matched > total, ...).
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mrm
