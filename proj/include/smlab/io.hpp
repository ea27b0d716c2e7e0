#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smlab/evolve.hpp"
#include "smlab/fields.hpp"
#include "smlab/report.hpp"
#include "smlab/sde.hpp"
#include "smlab/trotter.hpp"

namespace smlab {

// full 17-significant-digit decimal, so artifacts diff cleanly
std::string fmt17(double v);

// header `t,x,re,im`, one row per (time, node); stride subsamples times
void record_to_csv(const EvolutionRecord& rec, std::ostream& os, int time_stride = 1);

// header `x,rho,u,v,bplus,bminus,re_vq,im_vq`
void drift_fields_to_csv(const DriftFields& df, std::ostream& os);

// header `t,bin_center,count,mean_dx_fwd,mean_dx_bwd`
void ensemble_summary_csv(const PathEnsemble& pe, std::ostream& os,
                          const std::vector<double>& times, int n_bins,
                          double x_min, double x_max);

// header `kind,l,l2_error,ratio_to_prev`
void trotter_scan_csv(const std::vector<TrotterRun>& runs, std::ostream& os);

// little-endian dump: u64 n_paths, u64 n_times, f64 dt, then row-major
// positions as f64
void write_paths_binary(const PathEnsemble& pe, std::ostream& os);

// header `bin_center,count,re_est,im_est,re_target,im_target,stderr`
void bin_table_csv(const std::vector<struct BinCheck>& bins, std::ostream& os);

}  // namespace smlab
