#pragma once

#include "vexlab/error.hpp"
#include "vexlab/random.hpp"
#include "vexlab/numeric.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/iterated_log.hpp"
#include "vexlab/profile.hpp"
#include "vexlab/sampling.hpp"
#include "vexlab/exponent.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/oscillation.hpp"
#include "vexlab/diagnostics.hpp"
#include "vexlab/decomposition.hpp"
#include "vexlab/probe.hpp"
