#ifndef HALFSPACE_ERRORS_HPP
#define HALFSPACE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace halfspace {

/// Rejection sampling ran out of its attempt budget before hitting the band.
class band_exhausted : public std::runtime_error {
 public:
  explicit band_exhausted(std::uint64_t attempts)
      : std::runtime_error("band sampling exhausted after " +
                           std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}

  std::uint64_t attempts() const noexcept { return attempts_; }

 private:
  std::uint64_t attempts_;
};

/// An iterative solver missed its tolerance within the iteration cap.
class solver_failure : public std::runtime_error {
 public:
  solver_failure(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A normalization was asked of a vector that came out exactly zero.
class degenerate_output : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The label-weighted average used for initialization vanished.
class degenerate_init : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps an error raised inside a learner phase with the phase index.
class phase_error : public std::runtime_error {
 public:
  phase_error(int phase, const std::string& what)
      : std::runtime_error("phase " + std::to_string(phase) + ": " + what),
        phase_(phase) {}

  int phase() const noexcept { return phase_; }

 private:
  int phase_;
};

/// Configuration rejected during validation; `field()` names the offender.
class config_error : public std::runtime_error {
 public:
  config_error(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace halfspace

#endif  // HALFSPACE_ERRORS_HPP
