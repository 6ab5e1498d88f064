#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nsbtune {

using Label = std::uint32_t;

struct SourcePos {
  int line = 0;
  int column = 0;
};

inline std::string to_string(SourcePos p) {
  return std::to_string(p.line) + ":" + std::to_string(p.column);
}

/// Base of every diagnostic raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, const std::string& msg)
      : Error(to_string(pos) + ": syntax error: " + msg), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

class DuplicateRequire : public Error {
 public:
  DuplicateRequire(SourcePos pos, const std::string& var)
      : Error(to_string(pos) + ": duplicate require_nsb on '" + var + "'"),
        var_(var) {}
  const std::string& var() const { return var_; }

 private:
  std::string var_;
};

class UseBeforeDef : public Error {
 public:
  UseBeforeDef(Label label, SourcePos pos, const std::string& var)
      : Error(to_string(pos) + ": '" + var + "' (label " +
              std::to_string(label) + ") may be read before it is defined"),
        label_(label) {}
  Label label() const { return label_; }

 private:
  Label label_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(Label loop, long iterations)
      : Error("loop at label " + std::to_string(loop) + " exceeded " +
              std::to_string(iterations) + " iterations"),
        label_(loop) {}
  Label label() const { return label_; }

 private:
  Label label_;
};

class MathDomainError : public Error {
 public:
  MathDomainError(Label label, long iteration, const std::string& what)
      : Error(what + " at label " + std::to_string(label) + " (iteration " +
              std::to_string(iteration) + ")"),
        label_(label),
        iteration_(iteration) {}
  Label label() const { return label_; }
  long iteration() const { return iteration_; }

 private:
  Label label_;
  long iteration_;
};

class MissingRange : public Error {
 public:
  explicit MissingRange(Label label)
      : Error("no range information for label " + std::to_string(label)),
        label_(label) {}
  Label label() const { return label_; }

 private:
  Label label_;
};

class DivisorMayVanish : public Error {
 public:
  DivisorMayVanish(Label label, SourcePos pos)
      : Error(to_string(pos) + ": divisor at label " + std::to_string(label) +
              " takes the value 0 or has no positive lower bound"),
        label_(label) {}
  Label label() const { return label_; }

 private:
  Label label_;
};

class OverflowGuard : public Error {
 public:
  OverflowGuard(Label label, int value)
      : Error("nsb of label " + std::to_string(label) + " reached " +
              std::to_string(value) + " bits; the constraint system is "
              "likely mis-modeled"),
        label_(label) {}
  Label label() const { return label_; }

 private:
  Label label_;
};

class Unrepresentable : public Error {
 public:
  explicit Unrepresentable(int nsb)
      : Error(std::to_string(nsb) + " significant bits exceed binary128") {}
};

class ReachedZeroNsb : public Error {
 public:
  explicit ReachedZeroNsb(Label label)
      : Error("emulation reached label " + std::to_string(label) +
              " which has no range information and a 0-bit tuning"),
        label_(label) {}
  Label label() const { return label_; }

 private:
  Label label_;
};

}  // namespace nsbtune
