#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grade2 {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

/// Boundary velocity violates the zero net flux condition on a boundary component.
class FluxIncompatible : public Error {
public:
    FluxIncompatible(int component, double flux)
        : Error("flux incompatibility: boundary component " + std::to_string(component) +
                " has net flux " + std::to_string(flux) + " (int g.n ds must vanish)"),
          component_(component), flux_(flux) {}
    int component() const noexcept { return component_; }
    double flux() const noexcept { return flux_; }

private:
    int component_;
    double flux_;
};

/// g.n vanishes (numerically) on the inflow boundary where the data requires it not to.
class DegenerateInflow : public Error {
public:
    using Error::Error;
};

class LinearSolveFailure : public Error {
public:
    using Error::Error;
};

/// The velocity gradient is too large for the gradient-transport iteration to contract.
class ContractionViolated : public Error {
public:
    using Error::Error;
};

class MaxIterations : public Error {
public:
    using Error::Error;
};

/// A function evaluated to a non-finite value or outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace grade2
