#pragma once

#include "numgeo/embedstore.hpp"
#include "numgeo/error.hpp"
#include "numgeo/geometry.hpp"
#include "numgeo/rng.hpp"
#include "numgeo/stats.hpp"
#include "numgeo/stimuli.hpp"

namespace numgeo {
inline constexpr const char* kVersion = "0.1.0";
}
