#pragma once

#include "covertmac/channel.hpp"
#include "covertmac/channel_io.hpp"
#include "covertmac/infodiv.hpp"
#include "covertmac/optimize.hpp"
#include "covertmac/region.hpp"
#include "covertmac/rng.hpp"
#include "covertmac/simulator.hpp"
