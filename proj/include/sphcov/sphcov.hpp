#pragma once

#include "sphcov/bol.hpp"
#include "sphcov/bubble.hpp"
#include "sphcov/errors.hpp"
#include "sphcov/meanfield.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/ode.hpp"
#include "sphcov/onsager.hpp"
#include "sphcov/profile.hpp"
#include "sphcov/quadrature.hpp"
#include "sphcov/rearrange.hpp"
#include "sphcov/report.hpp"
#include "sphcov/suite.hpp"
