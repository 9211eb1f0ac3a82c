#pragma once

#include "errors.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "invariants.hpp"
#include "symmetries.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "sweep.hpp"
#include "io.hpp"
#include "presets.hpp"
