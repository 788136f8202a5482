#pragma once

#include "ewjn/config.hpp"
#include "ewjn/constants.hpp"
#include "ewjn/geometry.hpp"
#include "ewjn/gridmap.hpp"
#include "ewjn/harmonics.hpp"
#include "ewjn/integral_engine.hpp"
#include "ewjn/noise_tensor.hpp"
#include "ewjn/qubit_analysis.hpp"
#include "ewjn/scene.hpp"
#include "ewjn/sphere_multipole.hpp"
