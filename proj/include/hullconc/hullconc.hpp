#pragma once

// Umbrella header: tools for measuring how tightly a random polytope hugs
// its expected hull. Sampling models, 1D order statistics, polytope geometry,
// epsilon-nets, expected-hull / floating-body oracles, the net-certified
// sandwich test, and the batch experiment drivers behind the CLI.

#include "hullconc/bodies.hpp"
#include "hullconc/common.hpp"
#include "hullconc/config.hpp"
#include "hullconc/directions.hpp"
#include "hullconc/distributions.hpp"
#include "hullconc/experiments.hpp"
#include "hullconc/lp.hpp"
#include "hullconc/net.hpp"
#include "hullconc/normal.hpp"
#include "hullconc/order_stats.hpp"
#include "hullconc/polytope.hpp"
#include "hullconc/quadrature.hpp"
#include "hullconc/report.hpp"
#include "hullconc/rng.hpp"
#include "hullconc/roots.hpp"
#include "hullconc/scalar_law.hpp"
