#pragma once

// Umbrella header: finite-operation algebra, commutation characterisations,
// stage enumeration, formal concept analysis and the full pipeline.

#include "centmon/base.hpp"
#include "centmon/commutation.hpp"
#include "centmon/conditions.hpp"
#include "centmon/enumerate.hpp"
#include "centmon/fca.hpp"
#include "centmon/monoid.hpp"
#include "centmon/pipeline.hpp"
#include "centmon/sigma.hpp"
#include "centmon/ternary.hpp"
#include "centmon/unary.hpp"
