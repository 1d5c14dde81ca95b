// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_ERRORS_HPP
#define DTNRES_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace dtnres
{

// Base class of every error raised by the library. The CLI maps the
// subclasses onto exit codes (see include/dtnres/driver.hpp).
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the supported evaluation range (e.g. Bessel overflow).
class RangeError : public Error
{
public:
  using Error::Error;
};

// Argument outside the mathematical domain (e.g. Hankel function at z = 0).
class DomainError : public Error
{
public:
  using Error::Error;
};

// Evaluation at, or too close to, a pole of the DtN symbol g_nu.
class PoleError : public Error
{
public:
  PoleError(const std::string &what, int nu, std::complex<double> location)
    : Error(what), nu_(nu), location_(location)
  {
  }
  int nu() const { return nu_; }
  std::complex<double> location() const { return location_; }

private:
  int nu_;
  std::complex<double> location_;
};

// Numerically singular linear system.
class SingularError : public Error
{
public:
  using Error::Error;
};

// Invalid geometry (resonator crossing the DtN circle, inverted cells, ...).
class GeometryError : public Error
{
public:
  using Error::Error;
};

// Iterative procedure failed to converge.
class ConvergenceError : public Error
{
public:
  using Error::Error;
};

// Malformed configuration or input file.
class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace dtnres

#endif  // DTNRES_ERRORS_HPP
