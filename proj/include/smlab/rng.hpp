#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "smlab/grid.hpp"

namespace smlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// path seeds are a pure function of (master seed, path index)
inline std::uint64_t per_path_seed(std::uint64_t master, std::uint64_t path) {
    return splitmix64(master ^ splitmix64(path + 1));
}

// Per-path generator: mt19937_64 stream with explicit Box-Muller normals, so
// draws do not depend on the standard library's distribution internals.
class PathRng {
  public:
    explicit PathRng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return (eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Piecewise-linear inverse CDF built from a density sampled on a grid.
class GridSampler {
  public:
    GridSampler(const std::vector<double>& rho, const GridSpec& g);
    double draw(PathRng& rng) const { return invert(rng.uniform()); }
    double invert(double u) const;

  private:
    GridSpec grid_;
    std::vector<double> cdf_;
};

// Compensated (Kahan) accumulator so aggregate order barely matters.
struct KahanSum {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

struct KahanSumC {
    KahanSum re, im;
    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.sum, im.sum}; }
};

}  // namespace smlab
