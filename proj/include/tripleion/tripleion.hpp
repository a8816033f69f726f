#pragma once

#include "tripleion/config.hpp"
#include "tripleion/ensemble.hpp"
#include "tripleion/errors.hpp"
#include "tripleion/fields.hpp"
#include "tripleion/hamiltonians.hpp"
#include "tripleion/hessians.hpp"
#include "tripleion/integrator.hpp"
#include "tripleion/io.hpp"
#include "tripleion/newton.hpp"
#include "tripleion/ode.hpp"
#include "tripleion/rng.hpp"
#include "tripleion/saddles.hpp"
#include "tripleion/sampling.hpp"
#include "tripleion/selftest.hpp"
#include "tripleion/stability.hpp"
