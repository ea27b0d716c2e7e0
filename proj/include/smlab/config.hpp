#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace smlab {

// Scalar external potential V(x).  Harmonic stores the stiffness k so that
// V = k (x - center)^2 / 2; use Potential::harmonic(omega, mass) to build it
// from a frequency.
struct Potential {
    enum class Kind { Free, Harmonic, Constant };
    Kind kind = Kind::Free;
    double stiffness = 1.0;
    double center = 0.0;
    double value = 0.0;

    static Potential free() { return Potential{}; }
    static Potential harmonic(double omega = 1.0, double mass = 1.0, double center = 0.0) {
        return Potential{Kind::Harmonic, mass * omega * omega, center, 0.0};
    }
    static Potential constant(double c) {
        return Potential{Kind::Constant, 0.0, 0.0, c};
    }

    double operator()(double x) const {
        switch (kind) {
            case Kind::Free: return 0.0;
            case Kind::Harmonic: {
                const double d = x - center;
                return 0.5 * stiffness * d * d;
            }
            case Kind::Constant: return value;
        }
        return 0.0;
    }

    bool is_free() const { return kind == Kind::Free || (kind == Kind::Constant && value == 0.0); }

    std::string name() const {
        switch (kind) {
            case Kind::Free: return "free";
            case Kind::Harmonic: return "harmonic";
            case Kind::Constant: return "constant";
        }
        return "?";
    }
};

// Physical configuration.  sigma2() is the diffusion coefficient hbar/mass,
// derived rather than stored so the two can never disagree.
struct PhysConfig {
    double hbar = 1.0;
    double mass = 1.0;
    double dt = 1e-3;
    Potential potential;

    double sigma2() const { return hbar / mass; }
    double sigma() const { return std::sqrt(sigma2()); }

    void validate() const {
        if (!(hbar > 0.0)) throw std::invalid_argument("PhysConfig: hbar must be > 0");
        if (!(mass > 0.0)) throw std::invalid_argument("PhysConfig: mass must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("PhysConfig: dt must be > 0");
    }
};

}  // namespace smlab
