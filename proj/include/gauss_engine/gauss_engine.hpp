#pragma once

#include "gauss_engine/config.hpp"
#include "gauss_engine/csv.hpp"
#include "gauss_engine/drive.hpp"
#include "gauss_engine/dynamics.hpp"
#include "gauss_engine/engine_model.hpp"
#include "gauss_engine/error.hpp"
#include "gauss_engine/gaussian.hpp"
#include "gauss_engine/runner.hpp"
#include "gauss_engine/simulation.hpp"
#include "gauss_engine/thermo.hpp"
