#pragma once

#include "collapse/errors.hpp"

namespace collapse {

// Unit profiles. "natural" sets hbar = 1 so rates coincide with the
// hbar-free form of the master equations; "si" restores CODATA values.
struct PhysicalConstants {
    double G = 1.0;
    double hbar = 1.0;

    static PhysicalConstants natural() { return {1.0, 1.0}; }
    static PhysicalConstants si() { return {6.67430e-11, 1.054571817e-34}; }

    void validate() const {
        if (!(G > 0.0) || !(hbar > 0.0))
            throw ValidationError("PhysicalConstants: G and hbar must be positive");
    }
};

} // namespace collapse
