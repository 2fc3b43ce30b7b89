#pragma once

#include "rmp/clt.hpp"
#include "rmp/distributions.hpp"
#include "rmp/errors.hpp"
#include "rmp/estimators.hpp"
#include "rmp/matrix.hpp"
#include "rmp/parallel.hpp"
#include "rmp/random.hpp"
#include "rmp/stats.hpp"
