// Copyright 2026 The aerobust Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "aerobust/cloud.hpp"
#include "aerobust/codec.hpp"
#include "aerobust/color.hpp"
#include "aerobust/corrupt.hpp"
#include "aerobust/corruption_kind.hpp"
#include "aerobust/dataset.hpp"
#include "aerobust/dota.hpp"
#include "aerobust/error.hpp"
#include "aerobust/filters.hpp"
#include "aerobust/fractal.hpp"
#include "aerobust/geometry.hpp"
#include "aerobust/metrics.hpp"
#include "aerobust/raster.hpp"
#include "aerobust/rng.hpp"
#include "aerobust/schedule.hpp"
#include "aerobust/tiling.hpp"
#include "aerobust/version.hpp"
