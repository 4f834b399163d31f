#pragma once

#include "sybilbelief/belief.hpp"
#include "sybilbelief/config.hpp"
#include "sybilbelief/experiment.hpp"
#include "sybilbelief/generators.hpp"
#include "sybilbelief/graph.hpp"
#include "sybilbelief/labels.hpp"
#include "sybilbelief/metrics.hpp"
#include "sybilbelief/rng.hpp"
#include "sybilbelief/serialize.hpp"
#include "sybilbelief/walks.hpp"
