#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sgn {

/// Two fields (or a field and an operator) live on different grids.
class GridMismatch : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A norm of order n was requested on a grid that cannot resolve it.
class ResolutionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// The fluid depth left the admissible band (non-cavitation violated).
class CoercivityViolation : public std::runtime_error
{
public:
  CoercivityViolation(std::string const &what, double min_depth)
    : std::runtime_error(what), min_depth_(min_depth)
  {
  }
  double min_depth() const { return min_depth_; }

private:
  double min_depth_;
};

class NonConvergence : public std::runtime_error
{
public:
  NonConvergence(std::string const &what, int iterations, double residual)
    : std::runtime_error(what), iterations_(iterations), residual_(residual)
  {
  }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

private:
  int iterations_;
  double residual_;
};

class BlowUp : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error
{
public:
  ParseError(std::string const &what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

struct FieldViolation
{
  std::string field;
  std::string reason;
};

/// Collects every violated constraint of a configuration, not only the first.
class ValidationError : public std::invalid_argument
{
public:
  explicit ValidationError(std::vector<FieldViolation> violations)
    : std::invalid_argument(format(violations)), violations_(std::move(violations))
  {
  }
  ValidationError(std::string field, std::string reason)
    : ValidationError(std::vector<FieldViolation>{{std::move(field), std::move(reason)}})
  {
  }
  std::vector<FieldViolation> const &violations() const { return violations_; }

private:
  static std::string format(std::vector<FieldViolation> const &v)
  {
    std::string out = "invalid configuration:";
    for (auto const &e : v) {
      out += "\n  " + e.field + ": " + e.reason;
    }
    return out;
  }
  std::vector<FieldViolation> violations_;
};

} // namespace sgn
