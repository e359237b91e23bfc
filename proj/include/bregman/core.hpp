#pragma once

#include "bregman/core/check.hpp"
#include "bregman/core/functions.hpp"
#include "bregman/core/mirror.hpp"
#include "bregman/core/objective.hpp"
#include "bregman/core/scaling.hpp"
#include "bregman/core/types.hpp"
