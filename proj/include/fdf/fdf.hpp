#pragma once

// Umbrella header for the folding-domain density library.

#include "fdf/config.hpp"
#include "fdf/density.hpp"
#include "fdf/error.hpp"
#include "fdf/io.hpp"
#include "fdf/maps.hpp"
#include "fdf/oracle.hpp"
#include "fdf/partition.hpp"
#include "fdf/pipeline.hpp"
#include "fdf/quadrature.hpp"
#include "fdf/unfold.hpp"
