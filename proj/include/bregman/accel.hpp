#pragma once

#include "bregman/accel/checks.hpp"
#include "bregman/accel/methods.hpp"
#include "bregman/accel/record.hpp"
