#pragma once

#include "bregman/taylor/step.hpp"
