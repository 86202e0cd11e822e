#pragma once

#include "tdpb/calibration.hpp"
#include "tdpb/common.hpp"
#include "tdpb/critical_vector.hpp"
#include "tdpb/effect_size.hpp"
#include "tdpb/gs_bound.hpp"
#include "tdpb/io.hpp"
#include "tdpb/order_stats.hpp"
#include "tdpb/pvalue_dist.hpp"
#include "tdpb/rejection_dist.hpp"
#include "tdpb/rng.hpp"
#include "tdpb/sim.hpp"
#include "tdpb/stepup.hpp"
#include "tdpb/tdp_bound.hpp"
