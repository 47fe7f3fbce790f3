#pragma once

// Umbrella header for the PERCEPT library: topological change-point
// detection via persistence distributions, plus baselines and the
// calibration harness.

#include "percept/arl.hpp"
#include "percept/baselines.hpp"
#include "percept/binning.hpp"
#include "percept/detector.hpp"
#include "percept/diagram_distance.hpp"
#include "percept/embedding.hpp"
#include "percept/kmeans.hpp"
#include "percept/lower_star.hpp"
#include "percept/pca.hpp"
#include "percept/persistence.hpp"
#include "percept/pipeline.hpp"
#include "percept/point_cloud.hpp"
#include "percept/rips.hpp"
#include "percept/rng.hpp"
#include "percept/scenario.hpp"
#include "percept/simplex.hpp"
#include "percept/weight_opt.hpp"
