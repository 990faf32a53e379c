// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qdistill/channels.hpp"
#include "qdistill/config.hpp"
#include "qdistill/matrix.hpp"
#include "qdistill/metrics.hpp"
#include "qdistill/pipelines.hpp"
#include "qdistill/rng.hpp"
#include "qdistill/serialize.hpp"
#include "qdistill/states.hpp"
#include "qdistill/tomography.hpp"
#include "qdistill/uncertainty.hpp"

namespace qdistill {
inline constexpr const char* kVersion = "0.1.0";
}
