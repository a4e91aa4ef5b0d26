#pragma once

#include "comm_game.hpp"
#include "disjointness.hpp"
#include "errors.hpp"
#include "graph_reductions.hpp"
#include "hard_instances.hpp"
#include "interval_union.hpp"
#include "klee.hpp"
#include "modular.hpp"
#include "multi_index.hpp"
#include "operations.hpp"
#include "partial_sum.hpp"
#include "probe_memory.hpp"
#include "reductions.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "structures.hpp"
