#pragma once

// Umbrella header: Cournot equilibria of collaborative oligopolies, pairwise
// stability of collaboration graphs, and the supporting graph and solver
// machinery.

#include "colnet/cost.hpp"
#include "colnet/cournot.hpp"
#include "colnet/errors.hpp"
#include "colnet/graph.hpp"
#include "colnet/report.hpp"
#include "colnet/scenario.hpp"
#include "colnet/spatial.hpp"
#include "colnet/stability.hpp"
#include "colnet/version.hpp"
#include "colnet/vi.hpp"
