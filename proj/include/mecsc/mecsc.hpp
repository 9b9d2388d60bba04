#pragma once

#include "mecsc/capacity.hpp"
#include "mecsc/compression.hpp"
#include "mecsc/config.hpp"
#include "mecsc/errors.hpp"
#include "mecsc/experiment.hpp"
#include "mecsc/numeric.hpp"
#include "mecsc/orchestrator.hpp"
#include "mecsc/random.hpp"
#include "mecsc/scenario.hpp"
#include "mecsc/taskmodel.hpp"
