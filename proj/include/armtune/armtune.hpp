#pragma once

#include "armtune/config.hpp"
#include "armtune/dynamics.hpp"
#include "armtune/errors.hpp"
#include "armtune/ga.hpp"
#include "armtune/integrate.hpp"
#include "armtune/io.hpp"
#include "armtune/pid.hpp"
#include "armtune/simulate.hpp"
