#ifndef ADAMINE_ERRORS_HPP
#define ADAMINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adamine {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller passed something invalid (bad window, bad range, ...).
class ArgumentError : public Error {
public:
  explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// Filesystem / OS level failure.
class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// A payload could not be decoded (corrupt WAV data chunk etc.).
class DecodeError : public Error {
public:
  explicit DecodeError(const std::string& msg) : Error(msg) {}
};

// A requested span crosses a recording gap. Carries the gap bounds in
// channel-relative seconds.
class GapInData : public Error {
public:
  GapInData(const std::string& msg, double gap_t0, double gap_t1)
      : Error(msg), gap_t0(gap_t0), gap_t1(gap_t1) {}
  double gap_t0;
  double gap_t1;
};

// Input block is shorter than one analysis window.
class EmptySpectrogramError : public Error {
public:
  explicit EmptySpectrogramError(const std::string& msg) : Error(msg) {}
};

// A persisted file is structurally broken for its declared format.
class FormatError : public Error {
public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Semantic validation failed (invariant-violating record, unknown id, ...).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// pulse_train_score needs at least 3 pulses.
class InsufficientPulses : public Error {
public:
  explicit InsufficientPulses(const std::string& msg) : Error(msg) {}
};

// MLP training diverged. Carries the epoch the loss went non-finite.
class TrainingError : public Error {
public:
  TrainingError(const std::string& msg, int epoch) : Error(msg), epoch(epoch) {}
  int epoch;
};

// Job planning failed before any execution (unknown detector id, ...).
class PlanError : public Error {
public:
  explicit PlanError(const std::string& msg) : Error(msg) {}
};

// Cross-structure bookkeeping broke (partial result names an unknown task).
class ConsistencyError : public Error {
public:
  explicit ConsistencyError(const std::string& msg) : Error(msg) {}
};

}  // namespace adamine

#endif  // ADAMINE_ERRORS_HPP
