#pragma once

#include "wwlab/error.hpp"
#include "wwlab/linalg.hpp"
#include "wwlab/algebra.hpp"
#include "wwlab/dynamics.hpp"
#include "wwlab/averages.hpp"
#include "wwlab/spectral.hpp"
#include "wwlab/vdc.hpp"
#include "wwlab/experiments.hpp"
#include "wwlab/serialize.hpp"
#include "wwlab/scenario.hpp"
#include "wwlab/runner.hpp"
#include "wwlab/bundled.hpp"
