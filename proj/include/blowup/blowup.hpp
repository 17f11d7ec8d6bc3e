#pragma once

#include "config.hpp"
#include "criterion.hpp"
#include "duhamel.hpp"
#include "exponents.hpp"
#include "extended_real.hpp"
#include "extrema.hpp"
#include "grid.hpp"
#include "harness.hpp"
#include "iteration.hpp"
#include "model.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"
#include "solver.hpp"
#include "transform.hpp"
