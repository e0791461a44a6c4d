#pragma once

// Estimation: bandwidth rule and log-periodogram regression, CSS SARMA fit,
// GARCH quasi-likelihood, ARCH-LM test and the full pipeline.

#include "sarfima/garch.hpp"
#include "sarfima/gph.hpp"
#include "sarfima/pipeline.hpp"
#include "sarfima/sarma_fit.hpp"
