#pragma once

#include "errors.hpp"
#include "ode.hpp"
#include "spline.hpp"
#include "core.hpp"
#include "width.hpp"
#include "invariant.hpp"
#include "propagation.hpp"
#include "wigner.hpp"
#include "potential.hpp"
#include "numerov.hpp"
#include "stationary.hpp"
#include "susy.hpp"
#include "io.hpp"
