#pragma once

#include "hardy/lattice.hpp"
#include "hardy/linalg.hpp"
#include "hardy/symbols.hpp"
#include "hardy/operators.hpp"
#include "hardy/analysis.hpp"
#include "hardy/modelspace.hpp"
#include "hardy/random.hpp"
