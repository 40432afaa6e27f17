#pragma once

#include "unibike/constants.hpp"
#include "unibike/curve.hpp"
#include "unibike/error.hpp"
#include "unibike/geometry.hpp"
#include "unibike/hermite.hpp"
#include "unibike/io.hpp"
#include "unibike/models.hpp"
#include "unibike/pipeline.hpp"
#include "unibike/point.hpp"
#include "unibike/polar_track.hpp"
#include "unibike/rear_ode.hpp"
#include "unibike/seeds.hpp"
#include "unibike/special.hpp"
#include "unibike/verify.hpp"
