// SPDX-License-Identifier: Apache-2.0

#ifndef CUBIC_MOMENT_CUBIC_MOMENT_HPP
#define CUBIC_MOMENT_CUBIC_MOMENT_HPP

#include "atomic_measure.hpp"
#include "cubic.hpp"
#include "linalg.hpp"
#include "measure.hpp"
#include "moments.hpp"
#include "normalize.hpp"
#include "types.hpp"

#endif // CUBIC_MOMENT_CUBIC_MOMENT_HPP
