#pragma once

#include <vector>

#include "smlab/config.hpp"
#include "smlab/evolve.hpp"
#include "smlab/grid.hpp"
#include "smlab/report.hpp"

namespace smlab {

// Kinematic fields of the diffusion attached to a state.  rho, u and v are
// the primitive outputs; b_plus = v + u, b_minus = v - u and v_q = v - i u
// are assembled from them so those identities hold exactly.
struct DriftFields {
    GridSpec grid;
    double time_tag = 0.0;
    double sigma2 = 1.0;
    std::vector<double> rho, u, v, b_plus, b_minus;
    std::vector<cplx> v_q;
    bool complete = true;  // drift_from_h only fills b_plus

    double density_floor() const;  // 1e-8 * max(rho)
};

// Extract all fields from a normalized, never-vanishing psi:
//   rho = |psi|^2,  u = (sigma^2/2) grad(log rho),  v = sigma^2 Im(grad psi / psi).
// The guarded region {rho >= 1e-8 max rho} must be one contiguous block of
// nodes; an interior dip below the floor signals a (near-)node and throws.
DriftFields fields_from_psi(const ComplexField& psi, const PhysConfig& cfg);

// Forward drift of the h-process: b_plus = grad(log h) in unit-diffusion
// context.  h must be > 0 on the interior; boundary nodes pinned to zero by
// a Dirichlet solve get the adjacent interior drift value.
DriftFields drift_from_h(const ComplexField& h);

// Max-norm of b_plus - b_minus - sigma^2 grad(log rho) over guarded nodes.
ResidualReport check_nelson_relation(const DriftFields& df, const PhysConfig& cfg);

// Max-norm of d(rho)/dt + d(v rho)/dx at record time t via central stencils.
ResidualReport check_continuity(const EvolutionRecord& rec, double t);

// Per-time drift cache over a record, with clamped linear interpolation.
class DriftTable {
  public:
    explicit DriftTable(const EvolutionRecord& rec);
    const DriftFields& at(int i) const { return table_.at(i); }
    const EvolutionRecord& record() const { return *rec_; }
    double bplus(int i, double x) const;
    double bminus(int i, double x) const;
    double u_at(int i, double x) const;
    int n_times() const { return static_cast<int>(table_.size()); }

  private:
    const EvolutionRecord* rec_;
    std::vector<DriftFields> table_;
};

}  // namespace smlab
