#pragma once

// Umbrella header: the numerical modules. The CLI layer lives under wbv/cli.

#include "wbv/analysis.hpp"
#include "wbv/bv1d.hpp"
#include "wbv/mollify.hpp"
#include "wbv/variation.hpp"
#include "wbv/weights.hpp"
