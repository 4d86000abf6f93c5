#pragma once

#include "rrr/core.hpp"
#include "rrr/experiment.hpp"
#include "rrr/gibbs.hpp"
#include "rrr/io.hpp"
#include "rrr/model.hpp"
#include "rrr/partition.hpp"
#include "rrr/relaxation.hpp"
#include "rrr/rounding.hpp"
