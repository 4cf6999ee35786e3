#include "thermchan/errors.hpp"

#include <cstdio>

namespace thermchan {

namespace {
std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}
}  // namespace

NegativeTemperatureError::NegativeTemperatureError(double p_e)
    : DomainError("p_e = " + fmt_double(p_e) + " > 1/2 lies in the negative-temperature domain"), p_e_(p_e) {}

StepUnderflowError::StepUnderflowError(double t, double h)
    : Error("step size underflow (h = " + fmt_double(h) + ") at t = " + fmt_double(t) + " us"), t_(t) {}

DegenerateKernelError::DegenerateKernelError(double smallest, double second)
    : Error("Liouvillian kernel is not one-dimensional: smallest singular values " + fmt_double(smallest) + ", " +
            fmt_double(second)),
      smallest_(smallest),
      second_(second) {}

NoConvergenceError::NoConvergenceError(const std::string& what, double residual)
    : Error(what + " (residual " + fmt_double(residual) + ")"), residual_(residual) {}

ParseError::ParseError(std::string key, const std::string& message)
    : Error(key.empty() ? message : "'" + key + "': " + message), key_(std::move(key)) {}

IoError::IoError(std::string path, const std::string& message)
    : Error(path + ": " + message), path_(std::move(path)) {}

}  // namespace thermchan
