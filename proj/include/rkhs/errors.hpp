#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rkhs {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class invalid_argument : public error {
 public:
  using error::error;
};

/// The kernel matrix could not be factorized (non-positive pivot) or the
/// solve failed its post-solve residual check.
class conditioning_error : public error {
 public:
  conditioning_error(const std::string& what, std::size_t matrix_size, double smallest_pivot)
      : error(what), matrix_size_(matrix_size), smallest_pivot_(smallest_pivot) {}

  std::size_t matrix_size() const { return matrix_size_; }
  double smallest_pivot() const { return smallest_pivot_; }

 private:
  std::size_t matrix_size_;
  double smallest_pivot_;
};

/// A norm bound lies below a computed interpolant norm, so it cannot bound |f|.
class bound_error : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

/// A least-squares fit had no admissible solution. Carries the (beta, sse)
/// scan profile where one was computed.
class fit_error : public error {
 public:
  explicit fit_error(const std::string& what,
                     std::vector<std::pair<double, double>> profile = {})
      : error(what), profile_(std::move(profile)) {}

  const std::vector<std::pair<double, double>>& profile() const { return profile_; }

 private:
  std::vector<std::pair<double, double>> profile_;
};

/// Interpolant norms do not saturate: the target is likely outside the RKHS.
class divergence_error : public error {
 public:
  using error::error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class schema_error : public error {
 public:
  schema_error(const std::string& what, std::size_t line = 0)
      : error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rkhs
