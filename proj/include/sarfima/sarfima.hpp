#pragma once

#include "sarfima/core.hpp"
#include "sarfima/diagnose.hpp"
#include "sarfima/estimate.hpp"
#include "sarfima/forecast.hpp"
#include "sarfima/fracdiff.hpp"
#include "sarfima/simulate.hpp"
#include "sarfima/spectral.hpp"
#include "sarfima/studies.hpp"
