#pragma once

#include "gridplan/cli.hpp"
#include "gridplan/config.hpp"
#include "gridplan/delaunay.hpp"
#include "gridplan/errors.hpp"
#include "gridplan/evaluation.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/grid_io.hpp"
#include "gridplan/harness.hpp"
#include "gridplan/heuristics/run.hpp"
#include "gridplan/initial_candidates.hpp"
#include "gridplan/measures.hpp"
#include "gridplan/power_flow.hpp"
#include "gridplan/problem.hpp"
#include "gridplan/record_io.hpp"
#include "gridplan/reports.hpp"
#include "gridplan/topology.hpp"
