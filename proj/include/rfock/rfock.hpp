#pragma once

#include "rfock/errors.hpp"
#include "rfock/special_functions.hpp"
#include "rfock/quadrature.hpp"
#include "rfock/geometry.hpp"
#include "rfock/form_factor.hpp"
#include "rfock/covariance.hpp"
#include "rfock/momentum_oracle.hpp"
#include "rfock/rng.hpp"
#include "rfock/cylindrical.hpp"
#include "rfock/representations.hpp"
#include "rfock/singularity_lab.hpp"
#include "rfock/random_geometry.hpp"
#include "rfock/io.hpp"
