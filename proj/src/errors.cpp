#include "leapfrog/errors.hpp"

#include <sstream>

namespace leapfrog {

namespace {

template <typename... Args>
std::string concat(const Args&... args) {
    std::ostringstream os;
    os.precision(12);
    (os << ... << args);
    return os.str();
}

}  // namespace

CollisionError::CollisionError(std::size_t i, std::size_t j, double separation, double tau)
    : Error(concat("collision between rings ", i, " and ", j, " (separation ", separation,
                   " at tau=", tau, ")")),
      first_(i),
      second_(j),
      separation_(separation),
      tau_(tau) {}

OrthogonalityError::OrthogonalityError(double integral, double mass)
    : Error(concat("mode-1 datum violates orthogonality to zeta_1: integral ", integral,
                   " against L1 mass ", mass)),
      integral_(integral),
      mass_(mass) {}

ConvergenceError::ConvergenceError(const std::string& what, double last, double previous)
    : Error(concat(what, " did not converge (last ", last, ", previous ", previous, ")")),
      last_(last),
      previous_(previous) {}

ResolutionError::ResolutionError(std::size_t ring, double core_scale, double spacing)
    : Error(concat("ring ", ring, " under-resolved: core scale ", core_scale,
                   " < 2 x grid spacing ", spacing)),
      ring_(ring) {}

LostRingError::LostRingError(std::size_t ring, double window_mass, double total_mass)
    : Error(concat("ring ", ring, " lost: window mass ", window_mass, " of total ", total_mass)),
      ring_(ring) {}

ConfigError::ConfigError(std::string field, const std::string& message,
                         std::optional<std::size_t> byte_offset)
    : Error(byte_offset ? concat("config error at byte ", *byte_offset, ": ", message)
                        : concat("config error in '", field, "': ", message)),
      field_(std::move(field)),
      byte_offset_(byte_offset) {}

}  // namespace leapfrog
