#pragma once

#include "iafb/alignment.hpp"
#include "iafb/channel.hpp"
#include "iafb/errors.hpp"
#include "iafb/experiments.hpp"
#include "iafb/numerics.hpp"
#include "iafb/quantization.hpp"
#include "iafb/rates.hpp"
#include "iafb/rng.hpp"
#include "iafb/stats.hpp"
