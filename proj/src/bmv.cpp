#include "collapse/bmv.hpp"

#include "collapse/errors.hpp"

namespace collapse {

BmvScenario bmv_scenario(double m, double a, double d, double sigma_len) {
    if (!(m > 0.0) || !(a > 0.0) || !(d > 0.0) || !(sigma_len > 0.0))
        throw ValidationError("bmv_scenario: all parameters must be positive");

    Particle p1{m, {{-a / 2.0, 0.0, 0.0}, {+a / 2.0, 0.0, 0.0}}};
    Particle p2{m, {{d - a / 2.0, 0.0, 0.0}, {d + a / 2.0, 0.0, 0.0}}};
    ParticleSystem system({p1, p2}, sigma_len * sigma_len);

    return {std::move(system), DensityMatrix::uniform_superposition(4)};
}

} // namespace collapse
