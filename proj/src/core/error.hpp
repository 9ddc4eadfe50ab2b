// Copyright the sgfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SGFEM_CORE_ERROR_HPP
#define SGFEM_CORE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgfem
{

enum class ErrorKind
{
  input,
  numeric,
  config,
  io,
  limit,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct InputError : Error
{
  explicit InputError(const std::string &what) : Error(ErrorKind::input, what) {}
};

struct NumericError : Error
{
  explicit NumericError(const std::string &what) : Error(ErrorKind::numeric, what) {}
};

struct ConfigError : Error
{
  explicit ConfigError(const std::string &what) : Error(ErrorKind::config, what) {}
};

struct IoError : Error
{
  explicit IoError(const std::string &what) : Error(ErrorKind::io, what) {}
};

struct LimitError : Error
{
  explicit LimitError(const std::string &what) : Error(ErrorKind::limit, what) {}
};

// Iterative solver ran out of iterations. Keeps the residual history for diagnostics.
class SolverError : public NumericError
{
public:
  SolverError(const std::string &what, std::vector<double> history)
    : NumericError(what), history_(std::move(history))
  {
  }
  const std::vector<double> &history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

}  // namespace sgfem

#endif  // SGFEM_CORE_ERROR_HPP
