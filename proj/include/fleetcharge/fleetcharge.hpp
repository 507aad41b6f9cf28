#pragma once

// Umbrella header.

#include "fleetcharge/allocation.hpp"
#include "fleetcharge/common.hpp"
#include "fleetcharge/csv_io.hpp"
#include "fleetcharge/feasibility.hpp"
#include "fleetcharge/game.hpp"
#include "fleetcharge/pipeline.hpp"
#include "fleetcharge/projection.hpp"
#include "fleetcharge/rng.hpp"
#include "fleetcharge/robustness.hpp"
#include "fleetcharge/scenario.hpp"
#include "fleetcharge/scenario_io.hpp"
#include "fleetcharge/simplex_lp.hpp"
#include "fleetcharge/solver.hpp"
