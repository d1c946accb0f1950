#pragma once

// Umbrella header for the tunneling toolkit.

#include "qtun/core.hpp"
#include "qtun/dynamics.hpp"
#include "qtun/errors.hpp"
#include "qtun/exact.hpp"
#include "qtun/io.hpp"
#include "qtun/operators.hpp"
#include "qtun/potential.hpp"
#include "qtun/quadrature.hpp"
#include "qtun/wkb.hpp"
