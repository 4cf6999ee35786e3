#pragma once

#include <stdexcept>
#include <string>

namespace thermchan {

// Base for everything the library throws deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated (e.g. non-Hermitian input to herm_eig).
class ContractError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// p_e > 1/2 has no positive Gibbs temperature.
class NegativeTemperatureError : public DomainError {
 public:
  explicit NegativeTemperatureError(double p_e);
  double p_e() const { return p_e_; }

 private:
  double p_e_;
};

class StepUnderflowError : public Error {
 public:
  StepUnderflowError(double t, double h);
  double time() const { return t_; }

 private:
  double t_;
};

class DegenerateKernelError : public Error {
 public:
  DegenerateKernelError(double smallest, double second);
  double smallest() const { return smallest_; }
  double second() const { return second_; }

 private:
  double smallest_;
  double second_;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ParseError : public Error {
 public:
  ParseError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace thermchan
