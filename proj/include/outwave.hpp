#ifndef OUTWAVE_HPP
#define OUTWAVE_HPP

#include "outwave/diagnostics.hpp"
#include "outwave/errors.hpp"
#include "outwave/evolve.hpp"
#include "outwave/experiment.hpp"
#include "outwave/grid.hpp"
#include "outwave/linear_wave.hpp"
#include "outwave/nonlocal.hpp"
#include "outwave/norms.hpp"
#include "outwave/parallel.hpp"
#include "outwave/projection.hpp"

#endif
