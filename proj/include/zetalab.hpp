#pragma once

#include "zetalab/errors.hpp"
#include "zetalab/io.hpp"
#include "zetalab/moment_kernel.hpp"
#include "zetalab/numerics.hpp"
#include "zetalab/poly_engine.hpp"
#include "zetalab/prime_engine.hpp"
#include "zetalab/quad_twist.hpp"
#include "zetalab/random_model.hpp"
#include "zetalab/rng.hpp"
#include "zetalab/version.hpp"
#include "zetalab/zeta_engine.hpp"
