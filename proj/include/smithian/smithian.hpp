#pragma once

// Convenience include for the whole library.

#include "episode.hpp"
#include "expectimax.hpp"
#include "experiment.hpp"
#include "fully_observable.hpp"
#include "io.hpp"
#include "pbvi.hpp"
#include "pomdp.hpp"
#include "rng.hpp"
#include "signaling.hpp"
#include "stats.hpp"
#include "wumpus.hpp"
