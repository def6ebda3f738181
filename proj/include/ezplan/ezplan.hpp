#pragma once

// Umbrella header for the engagement-zone planning toolkit.

#include "ezplan/angles.hpp"
#include "ezplan/dubins.hpp"
#include "ezplan/ez_geometry.hpp"
#include "ezplan/io.hpp"
#include "ezplan/montecarlo.hpp"
#include "ezplan/planner.hpp"
#include "ezplan/rng.hpp"
#include "ezplan/scenario.hpp"
#include "ezplan/verify.hpp"
