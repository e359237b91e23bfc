#pragma once

#include "bregman/harness/acceptance.hpp"
#include "bregman/harness/config.hpp"
#include "bregman/harness/experiments.hpp"
#include "bregman/harness/report.hpp"
