// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace so3obs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSkewInput : Error {
  using Error::Error;
};
struct NotARotation : Error {
  using Error::Error;
};
struct AsymmetricG : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct NonUnitDirection : Error {
  using Error::Error;
};
struct RankDeficient : Error {
  using Error::Error;
};
struct StepTooLarge : Error {
  using Error::Error;
};
struct InfeasibleGains : Error {
  using Error::Error;
};
struct InvalidCertificate : Error {
  using Error::Error;
};
struct NonMonotoneTime : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// Parse failures carry the 1-based line number of the offending row.
struct ParseError : Error {
  ParseError(const std::string& what, long line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
  explicit ParseError(const std::string& what) : Error(what), line(0) {}
  long line;
};

}  // namespace so3obs
