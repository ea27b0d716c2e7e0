#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "smlab/evolve.hpp"
#include "smlab/fields.hpp"
#include "smlab/rng.hpp"

namespace smlab {

// Discrete-time trajectory bundle.  positions is path-major:
// pos(p,k) = positions[p*(n_steps+1)+k] at time t0 + k*dt.
// Noise increments are reconstructed on demand (they are exact functions of
// the stored positions and the drift used to generate them).
struct PathEnsemble {
    std::uint64_t master_seed = 0;
    int n_paths = 0;
    int n_steps = 0;
    double t0 = 0.0;
    double dt = 0.0;
    double half_width = 0.0;   // clamp bound
    long clamp_count = 0;      // steps that hit the clamp
    bool reverse = false;      // generated by the reverse-time integrator
    std::vector<double> positions;

    double pos(int path, int k) const { return positions[static_cast<std::size_t>(path) * (n_steps + 1) + k]; }
    double& pos(int path, int k) { return positions[static_cast<std::size_t>(path) * (n_steps + 1) + k]; }
    double time(int k) const { return t0 + k * dt; }
    std::uint64_t path_seed(int path) const { return per_path_seed(master_seed, path); }
};

// Euler-Maruyama under the forward drift b_plus of the record; initial
// positions sampled from rho(.,t0) by inverse CDF.  Requires dt_sde >= record
// dt (drift looked up at the nearest record time).
PathEnsemble simulate_forward(const EvolutionRecord& rec, int n_paths, double dt_sde,
                              std::uint64_t master_seed);
PathEnsemble simulate_forward(const DriftTable& drifts, int n_paths, double dt_sde,
                              std::uint64_t master_seed);

// Reverse-time integration under b_minus from terminal positions ~ rho(.,t1).
PathEnsemble simulate_reverse(const EvolutionRecord& rec, int n_paths, double dt_sde,
                              std::uint64_t master_seed);
PathEnsemble simulate_reverse(const DriftTable& drifts, int n_paths, double dt_sde,
                              std::uint64_t master_seed);

// Injected-drift variant used by diagnostics: drift(x, t), initial draw fn.
PathEnsemble simulate_custom(const std::function<double(double, double)>& drift,
                             const std::function<double(PathRng&)>& draw_initial,
                             double sigma, double half_width, double t0, double t1,
                             int n_paths, double dt_sde, std::uint64_t master_seed);

// Reconstructed driving noises of a forward ensemble.  Interior time indices
// k = 1 .. n_steps-1 only.
class QuantumNoise {
  public:
    QuantumNoise(const PathEnsemble& pe, const DriftTable& drifts);

    // one-sided increments of the two real noises
    double dwp(int path, int k) const;  // forward increment of w+
    double dwm(int path, int k) const;  // backward increment of w-
    // bilateral increment of the quantum noise: (1-i)/2 dwp + (1+i)/2 dwm
    cplx dwq(int path, int k) const;
    // one-sided increments of the quantum noise itself
    cplx dwq_forward(int path, int k) const;
    cplx dwq_backward(int path, int k) const;

    int first_interior() const { return 1; }
    int last_interior() const { return pe_->n_steps - 1; }
    const PathEnsemble& ensemble() const { return *pe_; }

  private:
    int rec_index(int k) const;
    const PathEnsemble* pe_;
    const DriftTable* drifts_;
    double sigma_;
};

// Sum over paths and interior times of the bilateral square of the
// quantum-noise increment, compared against -i * (covered time span).
struct QVReport {
    cplx sum{0.0, 0.0};
    cplx target{0.0, 0.0};
    double abs_error = 0.0;
    double stderr_ = 0.0;
    int n_paths = 0;
    double dt = 0.0;
};

QVReport quadratic_variation(const PathEnsemble& pe, const DriftTable& drifts);

// Streaming variant: simulates and accumulates without storing trajectories.
QVReport quadratic_variation_streaming(const DriftTable& drifts, int n_paths,
                                       double dt_sde, std::uint64_t master_seed);

enum class Direction { Forward, Backward };

struct DriftBin {
    double center = 0.0;
    long count = 0;
    double estimate = 0.0;
    double target = 0.0;
    double stderr_ = 0.0;
    bool qualifying = false;  // count >= 50
};

// Binned conditional mean of d(+/-)x/dt at time t against b(+/-)(bin center).
std::vector<DriftBin> conditional_drift_estimate(const PathEnsemble& pe,
                                                 const DriftTable& drifts,
                                                 Direction dir, double t, int n_bins,
                                                 double x_min, double x_max);

// Binned conditional mean of d+w_q aggregated over all interior times; the
// target is (1+i) * mean(u) * dt / sigma per bin.  Used as the forward
// non-martingale diagnostic.
struct FqnBin {
    double center = 0.0;
    long count = 0;
    cplx estimate{0.0, 0.0};
    cplx target{0.0, 0.0};
    double stderr_ = 0.0;
};
std::vector<FqnBin> fqn_conditional_means(const PathEnsemble& pe, const DriftTable& drifts,
                                          int n_bins, double x_min, double x_max);

// Same-interval semi-difference vs -u dt (bin-aggregated over all steps).
std::vector<FqnBin> k10_semidifference(const PathEnsemble& pe, const DriftTable& drifts,
                                       int n_bins, double x_min, double x_max);

// Terminal histogram total-variation distance to a density on the grid.
double born_tv_distance(const PathEnsemble& pe, const std::vector<double>& rho,
                        const GridSpec& g, int n_bins, double x_min, double x_max);

}  // namespace smlab
