#pragma once

#include <stdexcept>
#include <string>

namespace fluidbeam
{

/// Invalid argument, dimension mismatch or out-of-range index.
class ParameterError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A target region that contains no angular grid sample.
class DegenerateRegionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Requested storage exceeds the configured memory cap.
class CapacityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A beam with no energy where a nonzero beam is required.
class DegenerateBeamError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace fluidbeam
