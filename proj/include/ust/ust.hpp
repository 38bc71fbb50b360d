#pragma once

#include "ust/errors.hpp"
#include "ust/experiments.hpp"
#include "ust/fiber.hpp"
#include "ust/graph.hpp"
#include "ust/io.hpp"
#include "ust/kirchhoff.hpp"
#include "ust/lattice.hpp"
#include "ust/parallel.hpp"
#include "ust/path.hpp"
#include "ust/rational.hpp"
#include "ust/rng.hpp"
#include "ust/stats.hpp"
#include "ust/tree.hpp"
#include "ust/walk.hpp"
