#pragma once

// Umbrella header: the whole library in one include.

#include "dfds/domain.hpp"
#include "dfds/geometry.hpp"
#include "dfds/harness.hpp"
#include "dfds/objectives.hpp"
#include "dfds/random.hpp"
#include "dfds/solvers.hpp"
#include "dfds/theory.hpp"
#include "dfds/vec.hpp"
