#pragma once

#include "bench.hpp"
#include "generators.hpp"
#include "heuristics.hpp"
#include "macros.hpp"
#include "miner.hpp"
#include "pddl.hpp"
#include "records.hpp"
#include "search.hpp"
#include "sexpr.hpp"
#include "strips.hpp"
