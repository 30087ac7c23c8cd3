#pragma once

#include <stdexcept>
#include <string>

namespace bsmimo
{

// Input/config problems (CLI exit code 2).
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Numerically degenerate computation (CLI exit code 1).
class DegenerateError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public InputError
{
public:
  using InputError::InputError;
};

class GridMismatch : public InvalidArgument
{
public:
  GridMismatch() : InvalidArgument("patterns are defined on different grids") {}
};

class KeySetMismatch : public InvalidArgument
{
public:
  using InvalidArgument::InvalidArgument;
};

class UndefinedRatio : public InvalidArgument
{
public:
  using InvalidArgument::InvalidArgument;
};

class AngleOutOfRange : public InvalidArgument
{
public:
  using InvalidArgument::InvalidArgument;
};

class ParseError : public InputError
{
public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : InputError(where + ":" + std::to_string(line) + ": " + what), line_(line)
  {
  }
  explicit ParseError(const std::string& what) : InputError(what) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_ = 0;
};

class IoError : public InputError
{
public:
  using InputError::InputError;
};

class DegenerateAngle : public DegenerateError
{
public:
  using DegenerateError::DegenerateError;
};

class DegenerateBasis : public DegenerateError
{
public:
  using DegenerateError::DegenerateError;
};

class IllConditionedChannel : public DegenerateError
{
public:
  IllConditionedChannel(double condition)
      : DegenerateError("channel matrix is singular or ill-conditioned (cond = " + std::to_string(condition) + ")"),
        condition_(condition)
  {
  }

  double condition() const { return condition_; }

private:
  double condition_;
};

} // namespace bsmimo
