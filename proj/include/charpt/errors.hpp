#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace charpt {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed surface text. offset is the byte position of the offending token.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

// log/sqrt/division outside their domain, or a non-finite intermediate.
class DomainError : public Error {
public:
  using Error::Error;
};

class QuadratureError : public Error {
public:
  using Error::Error;
};

class OrderError : public Error {
public:
  using Error::Error;
};

class CharacteristicPointError : public Error {
public:
  using Error::Error;
};

class SubmersionError : public Error {
public:
  using Error::Error;
};

class FrameError : public Error {
public:
  using Error::Error;
};

class NewtonDivergence : public Error {
public:
  using Error::Error;
};

class NotCharacteristic : public Error {
public:
  using Error::Error;
};

class NotDegenerate : public Error {
public:
  using Error::Error;
};

class ZeroHessian : public Error {
public:
  using Error::Error;
};

class NormalFormResidual : public Error {
public:
  using Error::Error;
};

class CurveLeavesWindow : public Error {
public:
  using Error::Error;
};

class JacobianDegenerate : public Error {
public:
  using Error::Error;
};

class NotMild : public Error {
public:
  using Error::Error;
};

class NonFiniteIntegrand : public Error {
public:
  using Error::Error;
};

class NoDegeneratePoint : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace charpt
