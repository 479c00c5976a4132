#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// An m-th-root polynomial was evaluated at a direction where P(y) <= 0,
/// so F = P^(1/m) is not a positive real number there.
struct NonPositiveArgument : std::domain_error {
    using std::domain_error::domain_error;
};

/// A metric definition failed structural validation (odd root degree,
/// exponent rows of the wrong length or sum, duplicate multi-indices, ...).
struct InvalidMetric : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Critical-point search could not resolve any critical point. A smooth
/// periodic energy always has critical points, so this signals a degenerate
/// input, in practice a constant profile (Riemannian metric).
struct ResolutionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace finsler
