// Copyright (c) 2026 the nnsimplify authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bounds.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "network.hpp"
#include "nnet_io.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "rational_lp.hpp"
#include "simplifier.hpp"
#include "simulation.hpp"
#include "verifier.hpp"
