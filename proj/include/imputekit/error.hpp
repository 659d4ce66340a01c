#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imputekit {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV input; `row()` is the 1-based physical record number.
class ParseError : public Error
{
  public:
    ParseError(const std::string& what, std::size_t row) : Error(what), row_(row) {}
    std::size_t row() const { return row_; }

  private:
    std::size_t row_;
};

/// Well-formed input that violates a dataset invariant.
class IngestionError : public Error
{
  public:
    using Error::Error;
};

/// Invalid configuration or unmet precondition of an operation.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

/// A conditional model could not be fitted or evaluated.
class FitError : public Error
{
  public:
    using Error::Error;
};

}  // namespace imputekit
