#pragma once

// Umbrella header for the opportunistic beam scheduling library.

#include "obsched/accounting.hpp"
#include "obsched/allocation.hpp"
#include "obsched/beams.hpp"
#include "obsched/config.hpp"
#include "obsched/dispositions.hpp"
#include "obsched/dual.hpp"
#include "obsched/fading.hpp"
#include "obsched/fairness.hpp"
#include "obsched/gains.hpp"
#include "obsched/multipath.hpp"
#include "obsched/rng.hpp"
#include "obsched/scheduling.hpp"
#include "obsched/sim.hpp"
#include "obsched/trace_io.hpp"
#include "obsched/verify.hpp"
