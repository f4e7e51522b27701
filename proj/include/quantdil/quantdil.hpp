#pragma once

#include "quantdil/errors.hpp"
#include "quantdil/quadrature.hpp"
#include "quantdil/distributions.hpp"
#include "quantdil/grid.hpp"
#include "quantdil/quantizer.hpp"
#include "quantdil/greedy.hpp"
#include "quantdil/optimal.hpp"
#include "quantdil/dilation.hpp"
#include "quantdil/analysis.hpp"
#include "quantdil/cubature.hpp"
#include "quantdil/io.hpp"
