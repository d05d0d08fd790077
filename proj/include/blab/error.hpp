#ifndef BLAB_ERROR_HPP
#define BLAB_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace blab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: descriptors, configs, data files, out-of-domain arguments.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonPositiveRadius : public DomainError {
public:
    using DomainError::DomainError;
};

class InvalidDescriptor : public DomainError {
public:
    using DomainError::DomainError;
};

class SelfIntersecting : public DomainError {
public:
    using DomainError::DomainError;
};

class NonSmooth : public DomainError {
public:
    using DomainError::DomainError;
};

class OutOfRange : public DomainError {
public:
    using DomainError::DomainError;
};

class TooFewPoints : public DomainError {
public:
    using DomainError::DomainError;
};

class NotAccumulationPoint : public DomainError {
public:
    using DomainError::DomainError;
};

class NotAsymptotic : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateTriangle : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The segment meets the boundary below the transversality tolerance.
/// When raised from an orbit iteration, `step` is the 1-based failing step.
class GrazingIntersection : public NumericalError {
public:
    explicit GrazingIntersection(const std::string& what, std::optional<int> step = std::nullopt)
        : NumericalError(what), step_(step) {}

    std::optional<int> step() const { return step_; }

private:
    std::optional<int> step_;
};

class NoIntersection : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace blab

#endif  // BLAB_ERROR_HPP
