#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace leapfrog {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class UnsupportedMode : public Error {
public:
    using Error::Error;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Two ring centers closer than the collision threshold.
class CollisionError : public Error {
public:
    CollisionError(std::size_t i, std::size_t j, double separation, double tau);
    std::size_t first() const { return first_; }
    std::size_t second() const { return second_; }
    double separation() const { return separation_; }
    double tau() const { return tau_; }

private:
    std::size_t first_;
    std::size_t second_;
    double separation_;
    double tau_;
};

/// Mode-1 datum not orthogonal to the kernel zeta_1.
class OrthogonalityError : public Error {
public:
    OrthogonalityError(double integral, double mass);
    double integral() const { return integral_; }
    double mass() const { return mass_; }

private:
    double integral_;
    double mass_;
};

/// An iterative procedure (quadrature, linear solve) failed to converge.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last, double previous);
    double last() const { return last_; }
    double previous() const { return previous_; }

private:
    double last_;
    double previous_;
};

/// A ring core is not resolved by the grid.
class ResolutionError : public Error {
public:
    ResolutionError(std::size_t ring, double core_scale, double spacing);
    std::size_t ring() const { return ring_; }

private:
    std::size_t ring_;
};

/// Characteristic displacement per substep exceeded the hard limit.
class CflError : public Error {
public:
    using Error::Error;
};

/// A centroid window no longer carries vorticity.
class LostRingError : public Error {
public:
    LostRingError(std::size_t ring, double window_mass, double total_mass);
    std::size_t ring() const { return ring_; }

private:
    std::size_t ring_;
};

/// Scenario configuration rejected. `field()` is the JSON path of the
/// offending entry; `byte_offset()` is set for parse errors.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message,
                std::optional<std::size_t> byte_offset = std::nullopt);
    const std::string& field() const { return field_; }
    std::optional<std::size_t> byte_offset() const { return byte_offset_; }

private:
    std::string field_;
    std::optional<std::size_t> byte_offset_;
};

}  // namespace leapfrog
