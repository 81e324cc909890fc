#pragma once

#include "confgeo/experiment.hpp"
#include "confgeo/fft.hpp"
#include "confgeo/geodesic_solver.hpp"
#include "confgeo/holo_poly.hpp"
#include "confgeo/metric.hpp"
#include "confgeo/optimize.hpp"
#include "confgeo/tg_oracle.hpp"
