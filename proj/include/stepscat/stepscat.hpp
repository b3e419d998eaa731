#pragma once

#include "stepscat/errors.hpp"
#include "stepscat/io.hpp"
#include "stepscat/ivp.hpp"
#include "stepscat/jost.hpp"
#include "stepscat/marchenko.hpp"
#include "stepscat/scattering.hpp"
#include "stepscat/transition.hpp"
#include "stepscat/types.hpp"
#include "stepscat/verify.hpp"
