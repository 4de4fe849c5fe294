#pragma once

#include <string>
#include <vector>

#include "whisker/bayes_filter.hpp"
#include "whisker/contour.hpp"
#include "whisker/sim_harness.hpp"

namespace whisker {

/// One row per tick: tick,time,x,y,heading,z,curvature,contact,collision,
/// raw_x,raw_y,filtered_x,filtered_y,keypoint,theta,v_x,v_y. Missing tips are
/// empty cells.
std::string trial_csv(const TrialRecord& record);

/// step,prior_x,prior_y,prior_var_x,prior_var_y,meas_x,meas_y,r_x,r_y,k_x,k_y,
/// post_x,post_y,post_var_x,post_var_y (base frame).
std::string filter_trace_csv(const std::vector<FilterTraceRow>& rows);

/// distance,mean,std,max,slip,points,failed.
std::string sweep_csv(const std::vector<SweepTrial>& trials);

/// Box plot (min, quartiles, max) of per-tick error for each distance.
std::string sweep_svg(const std::vector<SweepTrial>& trials);

/// Ground-truth contour, sensor path and reconstructed contact points.
std::string contour_overlay_svg(const Contour& contour, const TrialRecord& record);

/// Quartile by linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace whisker
