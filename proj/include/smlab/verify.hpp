#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smlab/evolve.hpp"
#include "smlab/report.hpp"

namespace smlab {

// Named experiment presets shared by the CLI and the verification suites.
struct Scenario {
    std::string name;
    GridSpec grid;
    PhysConfig cfg;
    ComplexField initial;  // psi0 (Schrodinger) or h1 (heat)
    RecordKind kind = RecordKind::Schrodinger;
    double t1 = 1.0;
};

// Known names: free_packet, harmonic_ground, harmonic_coherent, ou_feynman_kac.
Scenario make_scenario(const std::string& name, const GridSpec& grid, double t1 = 1.0);
bool scenario_known(const std::string& name);

struct VerifyOptions {
    std::uint64_t seed = 7;
    std::string artifact_dir;  // when set, suites drop per-bin CSV tables here
};

// Each suite returns one CheckResult per assertion it makes.
std::vector<CheckResult> verify_trotter(const VerifyOptions& opt);
std::vector<CheckResult> verify_born(const VerifyOptions& opt);
std::vector<CheckResult> verify_nelson(const VerifyOptions& opt);
std::vector<CheckResult> verify_qv(const VerifyOptions& opt);
std::vector<CheckResult> verify_pathwise(const VerifyOptions& opt);
std::vector<CheckResult> verify_conditional(const VerifyOptions& opt);
std::vector<CheckResult> verify_fk(const VerifyOptions& opt);
std::vector<CheckResult> verify_operators(const VerifyOptions& opt);
std::vector<CheckResult> verify_kernels(const VerifyOptions& opt);
std::vector<CheckResult> verify_negative(const VerifyOptions& opt);
std::vector<CheckResult> verify_appendix(const VerifyOptions& opt);

std::vector<std::string> verify_suite_names();
std::vector<CheckResult> run_verify_suite(const std::string& name, const VerifyOptions& opt);

// Born-rule check for one scenario (also used by `verify born --scenario X`).
CheckResult born_check(const Scenario& sc, int n_paths, std::uint64_t seed);

}  // namespace smlab
