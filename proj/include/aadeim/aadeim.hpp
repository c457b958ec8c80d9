#pragma once

// Online-adaptive reduced-order modeling with empirical interpolation:
// POD/QDEIM construction, low-rank basis adaptation driven by residual-ranked
// sampling, full-order reference solvers, and the analysis toolkit.

#include "aadeim/adeim.hpp"
#include "aadeim/analysis.hpp"
#include "aadeim/banded.hpp"
#include "aadeim/config.hpp"
#include "aadeim/driver.hpp"
#include "aadeim/errors.hpp"
#include "aadeim/io.hpp"
#include "aadeim/linalg.hpp"
#include "aadeim/model.hpp"
#include "aadeim/models/advection.hpp"
#include "aadeim/models/burgers.hpp"
#include "aadeim/rng.hpp"
#include "aadeim/rom.hpp"
#include "aadeim/timing.hpp"
#include "aadeim/trajectory.hpp"
