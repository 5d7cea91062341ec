#ifndef JUMBO_JUMBO_HPP
#define JUMBO_JUMBO_HPP

// Convenience umbrella for the core library. Reporting (trace persistence
// and aggregation) lives in jumbo/reporting.hpp and is not pulled in here
// because it drags a JSON implementation into every translation unit.

#include "jumbo/acquisition.hpp"
#include "jumbo/benchmarks.hpp"
#include "jumbo/blr.hpp"
#include "jumbo/cma_es.hpp"
#include "jumbo/common.hpp"
#include "jumbo/gp.hpp"
#include "jumbo/gp_fit.hpp"
#include "jumbo/io.hpp"
#include "jumbo/kernels.hpp"
#include "jumbo/mlp.hpp"
#include "jumbo/optimizer.hpp"
#include "jumbo/search_space.hpp"
#include "jumbo/theory.hpp"

#endif  // JUMBO_JUMBO_HPP
