#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specstat {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration or a pathological ensemble specification.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

/// Requested work exceeds the configured memory budget.
class ResourceError : public Error
{
  public:
    using Error::Error;
};

/// A query falls outside the trusted range of a spectrum or curve.
class RangeError : public Error
{
  public:
    using Error::Error;
};

class StatisticsError : public Error
{
  public:
    using Error::Error;
};

class NumericalError : public Error
{
  public:
    using Error::Error;
};

/// Failure inside a single ensemble member; carries the member index.
class MemberError : public Error
{
  public:
    MemberError(std::size_t index, const std::string& what)
        : Error("ensemble member " + std::to_string(index) + ": " + what), index_(index)
    {
    }

    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

}  // namespace specstat
