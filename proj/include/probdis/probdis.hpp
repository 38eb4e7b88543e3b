#pragma once

#include "probdis/baselines.hpp"
#include "probdis/environments.hpp"
#include "probdis/failure_map.hpp"
#include "probdis/harness.hpp"
#include "probdis/kinematics.hpp"
#include "probdis/planner.hpp"
#include "probdis/rng.hpp"
#include "probdis/scenario_io.hpp"
#include "probdis/svg.hpp"
