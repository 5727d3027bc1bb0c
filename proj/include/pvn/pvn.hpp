#pragma once

#include "pvn/efficiency.hpp"
#include "pvn/error.hpp"
#include "pvn/experiments.hpp"
#include "pvn/fourier_grid.hpp"
#include "pvn/io/config.hpp"
#include "pvn/io/csv.hpp"
#include "pvn/io/svg.hpp"
#include "pvn/linalg.hpp"
#include "pvn/potentials.hpp"
#include "pvn/pruner.hpp"
#include "pvn/semiclassics.hpp"
#include "pvn/solver.hpp"
#include "pvn/spectrum.hpp"
#include "pvn/vn_basis.hpp"
