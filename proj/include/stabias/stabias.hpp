#pragma once

#include "stabias/config.hpp"
#include "stabias/errors.hpp"
#include "stabias/experiments.hpp"
#include "stabias/lre.hpp"
#include "stabias/models.hpp"
#include "stabias/numerics.hpp"
#include "stabias/policy.hpp"
#include "stabias/qz.hpp"
#include "stabias/solvers.hpp"
#include "stabias/welfare.hpp"
