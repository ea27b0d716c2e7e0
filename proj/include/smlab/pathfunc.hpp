#pragma once

#include <cstdint>
#include <vector>

#include "smlab/evolve.hpp"
#include "smlab/fields.hpp"
#include "smlab/report.hpp"
#include "smlab/sde.hpp"

namespace smlab {

// Per-path multiplicative weight built from per-step exponent increments.
// weight(p, k0, k1) = exp(sum of increments k0 <= k < k1), so windows split
// multiplicatively by construction.
struct WeightSeries {
    std::string definition;
    double t0 = 0.0;
    double dt = 0.0;
    int n_paths = 0;
    int n_steps = 0;
    std::vector<cplx> increments;  // path-major: [p*n_steps + k]

    cplx exponent(int path, int k0, int k1) const;
    cplx weight(int path, int k0, int k1) const;
    cplx final_weight(int path) const { return weight(path, 0, n_steps); }
};

// Exponential change-of-measure weight of the h-process against Wiener
// measure, forward Ito sums with left-endpoint drift evaluation:
//   Z over [k0,k1) = exp{ sum (1/2) g^2 dt - g . (x_{k+1} - x_k) },  g = b_plus.
WeightSeries girsanov_weight(const PathEnsemble& pe, const DriftTable& h_drifts);

// Wiener-expectation solution of the terminal-value heat problem at (x, t):
//   estimate of E[ h1(w(t1)) exp(-int_t^t1 V(w) dtau) ],  w(t) = x.
struct MCEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    int n_paths = 0;
};
MCEstimate feynman_kac_estimate(double x, double t, double t1,
                                const Potential& V, const std::function<double(double)>& h1,
                                int n_paths, double dt, std::uint64_t seed);

// Complex multiplicative weight along Nelson forward paths,
//   increment_k = -(i m / 2 hbar) v_q^2 dt + (i m / hbar) v_q . d_b x,
// with bilateral increments d_b x = (1-i)/2 d+x + (1+i)/2 d-x and one-sided
// end corrections so a window covers its full time span.
WeightSeries complex_weight(const PathEnsemble& pe, const DriftTable& drifts);

// Per-endpoint-bin comparison of E[psi0(x(0)) exp(-(i/hbar) int V) Ztilde | bin]
// against psi(bin center, t).
struct BinCheck {
    double center = 0.0;
    long count = 0;
    cplx estimate{0.0, 0.0};
    cplx target{0.0, 0.0};
    double stderr_ = 0.0;
    double bias_bound = 0.0;
    bool qualifying = false;  // count >= 200
    bool pass = false;
};
std::vector<BinCheck> conditional_representation_check(const PathEnsemble& pe,
                                                       const EvolutionRecord& rec,
                                                       const WeightSeries& zt, double t,
                                                       int n_bins, double x_min, double x_max);

// Modulus law |Ztilde| = rho^{1/2}(x(t),t) / rho0^{1/2}(x(0)).
struct TotalVariationReport {
    double frac_within = 0.0;       // share of paths with relative error <= 5e-2
    double per_path_tolerance = 5e-2;
    double mass_integral = 0.0;     // MC value of E[|Z| / rho^{1/2}(x(t))]
    double mass_integral_ref = 0.0; // quadrature of rho0^{1/2}
    double mass_integral_stderr = 0.0;
    double l1_psi0 = 0.0;           // quadrature of |psi0|
    std::vector<BinCheck> bins;     // mean of |Z| rho0^{1/2}(x0) vs rho^{1/2}(bin)
    bool pass = false;
};
TotalVariationReport total_variation_check(const PathEnsemble& pe, const EvolutionRecord& rec,
                                           const WeightSeries& zt, double t,
                                           int n_bins, double x_min, double x_max);

// ---- finite-partition complex measures -------------------------------------

struct FinitePartitionMeasure {
    std::vector<cplx> masses;
    cplx total() const;
};

double finite_partition_tv(const FinitePartitionMeasure& m);

struct PolarDecomposition {
    std::vector<cplx> unimodular;     // h_k, |h_k| = 1 (1 where mass is 0)
    std::vector<double> tv_masses;    // |mass_k|
};
PolarDecomposition polar_decompose(const FinitePartitionMeasure& m);

}  // namespace smlab
