#pragma once

// Umbrella header: the full browsing-model library.

#include "browselab/config.hpp"
#include "browselab/grid.hpp"
#include "browselab/json_io.hpp"
#include "browselab/layout.hpp"
#include "browselab/linear.hpp"
#include "browselab/metrics.hpp"
#include "browselab/simulate.hpp"
