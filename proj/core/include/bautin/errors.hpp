#pragma once

#include <stdexcept>
#include <string>

namespace bautin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the model's domain (negative state, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The nontrivial equilibrium does not exist for the given parameters.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// No purely imaginary characteristic root exists at the requested point.
class NoHopfError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_re, double last_im, double residual)
      : Error(what), last_re_(last_re), last_im_(last_im), residual_(residual) {}

  double last_re() const noexcept { return last_re_; }
  double last_im() const noexcept { return last_im_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_re_;
  double last_im_;
  double residual_;
};

/// Raised when the DDE solver cannot continue; carries the last time reached.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace bautin
