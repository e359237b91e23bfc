#pragma once

#include "bregman/accel.hpp"
#include "bregman/core.hpp"
#include "bregman/flows.hpp"
#include "bregman/taylor.hpp"
