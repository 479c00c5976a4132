#pragma once

// Umbrella header for the Minkowski-norm analysis toolkit.

#include <finsler/calculus.hpp>
#include <finsler/conjecture.hpp>
#include <finsler/energy.hpp>
#include <finsler/errors.hpp>
#include <finsler/hyperdual.hpp>
#include <finsler/linalg.hpp>
#include <finsler/norms.hpp>
#include <finsler/polynomial.hpp>
#include <finsler/tensor.hpp>
