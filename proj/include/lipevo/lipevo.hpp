#pragma once

#include "lipevo/corpus.hpp"
#include "lipevo/function_spaces.hpp"
#include "lipevo/grid.hpp"
#include "lipevo/kernels.hpp"
#include "lipevo/solver.hpp"
#include "lipevo/spec_parse.hpp"
#include "lipevo/suites.hpp"
#include "lipevo/symbols.hpp"
#include "lipevo/verify.hpp"
#include "lipevo/weights.hpp"
