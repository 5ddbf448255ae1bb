#pragma once

#include "bnet/error.hpp"
#include "bnet/factor.hpp"
#include "bnet/format.hpp"
#include "bnet/inference.hpp"
#include "bnet/model.hpp"
#include "bnet/netdef.hpp"
#include "bnet/scoring.hpp"
#include "bnet/simulate.hpp"
