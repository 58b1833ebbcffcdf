#pragma once

#include "rgbm/arbitrage.hpp"
#include "rgbm/bounds.hpp"
#include "rgbm/errors.hpp"
#include "rgbm/io.hpp"
#include "rgbm/math.hpp"
#include "rgbm/model.hpp"
#include "rgbm/pricing.hpp"
#include "rgbm/rng.hpp"
#include "rgbm/sde.hpp"
