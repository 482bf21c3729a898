#pragma once

// Umbrella header.

#include "gip/aleksandrov.hpp"
#include "gip/dual_polytope.hpp"
#include "gip/error.hpp"
#include "gip/export.hpp"
#include "gip/gauss_image.hpp"
#include "gip/io.hpp"
#include "gip/linprog.hpp"
#include "gip/measures.hpp"
#include "gip/oracles.hpp"
#include "gip/parallel.hpp"
#include "gip/solver.hpp"
#include "gip/sphere.hpp"
