#pragma once

#include <stdexcept>
#include <string>

namespace expander {

// Invalid input or a mathematically impossible request. The CLI maps these to
// exit code 2.
class DomainError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Unreadable or malformed files. The CLI maps these to exit code 3.
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class NonResidue : public DomainError
{
  public:
    using DomainError::DomainError;
};

class NotOrdinary : public DomainError
{
  public:
    using DomainError::DomainError;
};

class UnsupportedModularLevel : public DomainError
{
  public:
    using DomainError::DomainError;
};

class NotRational : public DomainError
{
  public:
    using DomainError::DomainError;
};

class KernelCollision : public DomainError
{
  public:
    using DomainError::DomainError;
};

class FactorizationFailed : public DomainError
{
  public:
    using DomainError::DomainError;
};

} // namespace expander
