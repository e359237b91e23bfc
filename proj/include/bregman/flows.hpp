#pragma once

#include "bregman/flows/analysis.hpp"
#include "bregman/flows/dilation.hpp"
#include "bregman/flows/integrate.hpp"
#include "bregman/flows/system.hpp"
