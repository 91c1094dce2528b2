#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace memthermo {

// Base for every failure the library reports on purpose. Precondition
// violations on plain arguments (NaN, negative widths, ...) are reported as
// std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  ExtractionError(std::string stage, const std::string& what)
      : Error("extraction failed in " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ResetError : public ProtocolError {
 public:
  ResetError(const std::string& what, double last_resistance)
      : ProtocolError(what), last_resistance_(last_resistance) {}
  double last_resistance() const noexcept { return last_resistance_; }

 private:
  double last_resistance_;
};

class OutOfRangeError : public Error {
 public:
  OutOfRangeError(const std::string& what, double band_low, double band_high)
      : Error(what), band_low_(band_low), band_high_(band_high) {}
  double band_low() const noexcept { return band_low_; }
  double band_high() const noexcept { return band_high_; }

 private:
  double band_low_;
  double band_high_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace memthermo
