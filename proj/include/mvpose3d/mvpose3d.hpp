#pragma once

// Umbrella header: multi-view multi-person 3D pose estimation and tracking.

#include "mvpose3d/assignment.hpp"
#include "mvpose3d/association.hpp"
#include "mvpose3d/geometry.hpp"
#include "mvpose3d/io.hpp"
#include "mvpose3d/metrics.hpp"
#include "mvpose3d/pipeline.hpp"
#include "mvpose3d/skeleton.hpp"
#include "mvpose3d/smoothing.hpp"
#include "mvpose3d/synth.hpp"
#include "mvpose3d/tracking.hpp"
#include "mvpose3d/types.hpp"
