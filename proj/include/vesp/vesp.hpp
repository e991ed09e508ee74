#pragma once

#include "vesp/angles.hpp"
#include "vesp/changepoint.hpp"
#include "vesp/config.hpp"
#include "vesp/errors.hpp"
#include "vesp/io.hpp"
#include "vesp/metrics.hpp"
#include "vesp/motion.hpp"
#include "vesp/pipeline.hpp"
#include "vesp/policy.hpp"
#include "vesp/rng.hpp"
#include "vesp/scenario.hpp"
#include "vesp/trajectory.hpp"
#include "vesp/ukf.hpp"
