#pragma once

#include "numgeo/axes.hpp"
#include "numgeo/density.hpp"
#include "numgeo/procrustes.hpp"
#include "numgeo/similarity.hpp"
#include "numgeo/subspace.hpp"
#include "numgeo/synthesize.hpp"
