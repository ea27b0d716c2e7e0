#include "smlab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "smlab/pathfunc.hpp"

#include "json.hpp"

namespace smlab {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string ResidualReport::to_json() const {
    nlohmann::json j;
    j["check"] = check;
    j["max_residual"] = max_residual;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["grid"] = {{"n_points", n_points}, {"half_width", half_width}};
    j["dt"] = dt;
    return j.dump();
}

void record_to_csv(const EvolutionRecord& rec, std::ostream& os, int time_stride) {
    os << "t,x,re,im\n";
    for (int i = 0; i < rec.n_times(); i += time_stride) {
        const ComplexField& f = rec.at(i);
        const std::string ts = fmt17(rec.time(i));
        for (int j = 0; j < f.size(); ++j)
            os << ts << ',' << fmt17(f.grid.node(j)) << ',' << fmt17(f.values[j].real())
               << ',' << fmt17(f.values[j].imag()) << '\n';
    }
}

void drift_fields_to_csv(const DriftFields& df, std::ostream& os) {
    os << "x,rho,u,v,bplus,bminus,re_vq,im_vq\n";
    const int n = static_cast<int>(df.rho.size());
    for (int j = 0; j < n; ++j) {
        os << fmt17(df.grid.node(j)) << ',' << fmt17(df.rho[j]) << ','
           << fmt17(df.complete ? df.u[j] : 0.0) << ','
           << fmt17(df.complete ? df.v[j] : 0.0) << ',' << fmt17(df.b_plus[j]) << ','
           << fmt17(df.complete ? df.b_minus[j] : 0.0) << ','
           << fmt17(df.complete ? df.v_q[j].real() : 0.0) << ','
           << fmt17(df.complete ? df.v_q[j].imag() : 0.0) << '\n';
    }
}

void ensemble_summary_csv(const PathEnsemble& pe, std::ostream& os,
                          const std::vector<double>& times, int n_bins,
                          double x_min, double x_max) {
    os << "t,bin_center,count,mean_dx_fwd,mean_dx_bwd\n";
    const double w = (x_max - x_min) / n_bins;
    for (double t : times) {
        const int k = static_cast<int>((t - pe.t0) / pe.dt + 0.5);
        if (k < 1 || k > pe.n_steps - 1) continue;
        std::vector<double> fwd(n_bins, 0.0), bwd(n_bins, 0.0);
        std::vector<long> counts(n_bins, 0);
        for (int p = 0; p < pe.n_paths; ++p) {
            const double x = pe.pos(p, k);
            const int b = static_cast<int>((x - x_min) / w);
            if (x < x_min || b < 0 || b >= n_bins) continue;
            fwd[b] += pe.pos(p, k + 1) - x;
            bwd[b] += x - pe.pos(p, k - 1);
            ++counts[b];
        }
        const std::string ts = fmt17(pe.time(k));
        for (int b = 0; b < n_bins; ++b) {
            const double c = counts[b] > 0 ? static_cast<double>(counts[b]) : 1.0;
            os << ts << ',' << fmt17(x_min + (b + 0.5) * w) << ',' << counts[b] << ','
               << fmt17(fwd[b] / c) << ',' << fmt17(bwd[b] / c) << '\n';
        }
    }
}

void trotter_scan_csv(const std::vector<TrotterRun>& runs, std::ostream& os) {
    os << "kind,l,l2_error,ratio_to_prev\n";
    double prev = 0.0;
    bool first = true;
    for (const auto& r : runs) {
        os << (r.kind == TrotterKind::Quantum ? "quantum" : "heat") << ',' << r.l << ','
           << fmt17(r.l2_error) << ',' << (first ? "" : fmt17(prev / r.l2_error)) << '\n';
        prev = r.l2_error;
        first = false;
    }
}

void write_paths_binary(const PathEnsemble& pe, std::ostream& os) {
    static_assert(std::endian::native == std::endian::little,
                  "binary path dump assumes a little-endian host");
    const std::uint64_t np = pe.n_paths, nt = pe.n_steps + 1;
    os.write(reinterpret_cast<const char*>(&np), 8);
    os.write(reinterpret_cast<const char*>(&nt), 8);
    os.write(reinterpret_cast<const char*>(&pe.dt), 8);
    os.write(reinterpret_cast<const char*>(pe.positions.data()),
             static_cast<std::streamsize>(pe.positions.size() * sizeof(double)));
}

void bin_table_csv(const std::vector<BinCheck>& bins, std::ostream& os) {
    os << "bin_center,count,re_est,im_est,re_target,im_target,stderr\n";
    for (const auto& b : bins)
        os << fmt17(b.center) << ',' << b.count << ',' << fmt17(b.estimate.real()) << ','
           << fmt17(b.estimate.imag()) << ',' << fmt17(b.target.real()) << ','
           << fmt17(b.target.imag()) << ',' << fmt17(b.stderr_) << '\n';
}

}  // namespace smlab
