#pragma once

#include "maas/baselines.hpp"
#include "maas/dual.hpp"
#include "maas/io.hpp"
#include "maas/oracles.hpp"
#include "maas/plot.hpp"
#include "maas/primal.hpp"
#include "maas/problem.hpp"
#include "maas/scenario.hpp"
