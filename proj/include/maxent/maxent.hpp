#pragma once

// Maximum entropy graph models with one potential per vertex: per-edge
// distributions, sampling, MLE fitting, Fisher information approximations,
// Wald inference and the Monte Carlo harness.

#include "maxent/edge_csv.hpp"
#include "maxent/fisher.hpp"
#include "maxent/graph.hpp"
#include "maxent/inference.hpp"
#include "maxent/random.hpp"
#include "maxent/simulation.hpp"
#include "maxent/solver.hpp"
#include "maxent/weight_model.hpp"
