// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "epkit/adaptive.hpp"
#include "epkit/bounds.hpp"
#include "epkit/concavity.hpp"
#include "epkit/fading.hpp"
#include "epkit/gaussian.hpp"
#include "epkit/grid.hpp"
#include "epkit/mc.hpp"
#include "epkit/modem.hpp"
#include "epkit/quadrature.hpp"
#include "epkit/roots.hpp"

namespace epkit {
inline constexpr const char* kVersion = "0.1.0";
}
