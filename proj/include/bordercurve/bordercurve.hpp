#pragma once

#include "errors.hpp"
#include "numerics.hpp"
#include "monotone.hpp"
#include "transforms.hpp"
#include "feasibility.hpp"
#include "rng.hpp"
#include "environments.hpp"
#include "allocation.hpp"
#include "solver.hpp"
#include "oracle.hpp"
#include "catalog.hpp"
#include "env_json.hpp"
