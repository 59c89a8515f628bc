// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_CLOUDCAST_HPP
#define CLOUDCAST_CLOUDCAST_HPP

#include "cloudcast/flow.hpp"
#include "cloudcast/grids.hpp"
#include "cloudcast/io.hpp"
#include "cloudcast/metrics.hpp"
#include "cloudcast/nowcast.hpp"
#include "cloudcast/pipeline.hpp"
#include "cloudcast/render.hpp"
#include "cloudcast/segmentation.hpp"
#include "cloudcast/synthetic.hpp"
#include "cloudcast/tuning.hpp"

#endif  // CLOUDCAST_CLOUDCAST_HPP
