#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace convtact {

// Base of every error thrown by the library. Callers that only care about
// "bad data vs. programming error" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { public: using Error::Error; };
class RankError : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class LookupError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class InputError : public Error { public: using Error::Error; };
class ScaleError : public Error { public: using Error::Error; };
class ScoringError : public Error { public: using Error::Error; };

// Malformed file content. offset is the byte position where parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace convtact
