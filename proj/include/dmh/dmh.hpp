#pragma once

#include "dmh/branch_weight.hpp"   // IWYU pragma: export
#include "dmh/couplings.hpp"       // IWYU pragma: export
#include "dmh/dual.hpp"            // IWYU pragma: export
#include "dmh/error.hpp"           // IWYU pragma: export
#include "dmh/objectives.hpp"      // IWYU pragma: export
#include "dmh/parallel.hpp"        // IWYU pragma: export
#include "dmh/proposals.hpp"       // IWYU pragma: export
#include "dmh/random.hpp"          // IWYU pragma: export
#include "dmh/samplers.hpp"        // IWYU pragma: export
#include "dmh/targets/acceptance.hpp"  // IWYU pragma: export
#include "dmh/targets/gaussian.hpp"    // IWYU pragma: export
#include "dmh/targets/ising.hpp"       // IWYU pragma: export
#include "dmh/targets/mixture.hpp"     // IWYU pragma: export
#include "dmh/targets/tabular.hpp"     // IWYU pragma: export
