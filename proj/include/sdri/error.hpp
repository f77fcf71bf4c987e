#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdri {

enum class ErrorKind {
    OverlappingInteriors,
    DegenerateGeometry,
    UnclassifiableArc,
    InvariantViolation,
    HypothesisViolated,
    MeshFailure,
    SingularSystem,
    NonConvergence,
    UnknownPreset,
    NoTriplePoint,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Base class for every error raised by the library. The kind decides the
/// CLI exit code (see io/run.cpp).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class HypothesisError : public Error {
public:
    HypothesisError(const std::string& what) : Error(ErrorKind::HypothesisViolated, what) {}
};

class MeshError : public Error {
public:
    MeshError(const std::string& what) : Error(ErrorKind::MeshFailure, what) {}
};

class SolveError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ProbeError : public Error {
public:
    using Error::Error;
};

}  // namespace sdri
