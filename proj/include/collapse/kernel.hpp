#pragma once

#include "collapse/errors.hpp"

namespace collapse {

// Detector correlator gamma_rs. CSL: gamma * delta(r - s). DP: kappa * G / |r - s|;
// kappa = 2 reproduces the standard DP rate.
struct Kernel {
    enum class Type { csl, dp };

    Type type = Type::dp;
    double strength = 2.0; // gamma for CSL, kappa for DP

    static Kernel csl(double gamma) { return make(Type::csl, gamma); }
    static Kernel dp(double kappa = 2.0) { return make(Type::dp, kappa); }

private:
    static Kernel make(Type t, double s) {
        if (!(s > 0.0)) throw ValidationError("Kernel: strength must be positive");
        return Kernel{t, s};
    }
};

} // namespace collapse
