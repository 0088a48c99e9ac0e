#pragma once

// Everything: model, closed forms, simulator, optimizer, config and sweeps.
#include "fdnoma/analytic.hpp"
#include "fdnoma/barrier.hpp"
#include "fdnoma/channel.hpp"
#include "fdnoma/config.hpp"
#include "fdnoma/errors.hpp"
#include "fdnoma/link.hpp"
#include "fdnoma/optimizer.hpp"
#include "fdnoma/params.hpp"
#include "fdnoma/rng.hpp"
#include "fdnoma/simulator.hpp"
#include "fdnoma/special_functions.hpp"
#include "fdnoma/sumrate.hpp"
#include "fdnoma/sweep.hpp"
#include "fdnoma/throughput.hpp"
