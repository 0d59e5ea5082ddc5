#pragma once

#include <cstddef>
#include <vector>

#include "collapse/vec3.hpp"

namespace collapse {

struct Particle {
    double mass = 0.0;
    std::vector<Vec3> sites; // candidate positions, fixed order
};

// Joint configuration basis of particles pinned to discrete candidate sites.
// The smearing parameter of the Gaussian profile g is stored as a variance
// (length^2); the length scale entering the erf overlap formula is its
// square root, exposed as sigma_len().
class ParticleSystem {
public:
    ParticleSystem(std::vector<Particle> particles, double sigma_variance);

    std::size_t particle_count() const { return particles_.size(); }
    const Particle& particle(std::size_t n) const { return particles_[n]; }
    std::size_t config_count() const { return config_count_; }

    double sigma_variance() const { return sigma_variance_; }
    double sigma_len() const { return sigma_len_; }

    // total number of (particle, site) slots; flat ids are particle-major
    std::size_t site_slot_count() const { return slot_offsets_.back(); }
    std::size_t slot_id(std::size_t particle, std::size_t site) const {
        return slot_offsets_[particle] + site;
    }
    const Vec3& slot_position(std::size_t slot) const { return slot_positions_[slot]; }
    double slot_mass(std::size_t slot) const { return slot_masses_[slot]; }

    // lexicographic index <-> per-particle site indices (particle 0 varies slowest)
    std::vector<std::size_t> site_indices(std::size_t config_index) const;
    std::size_t config_index(const std::vector<std::size_t>& sites) const;
    std::size_t site_of(std::size_t config_index, std::size_t particle) const;

    std::vector<Vec3> configuration_positions(std::size_t config_index) const;

    Vec3 centroid() const; // over all slots, mass-weighted
    double max_site_spread() const; // max distance of a site from the centroid

private:
    std::vector<Particle> particles_;
    double sigma_variance_ = 0.0;
    double sigma_len_ = 0.0;
    std::size_t config_count_ = 0;
    std::vector<std::size_t> strides_;      // per particle
    std::vector<std::size_t> slot_offsets_; // size particle_count()+1
    std::vector<Vec3> slot_positions_;
    std::vector<double> slot_masses_;
};

// Desk-scale guard on the joint configuration count.
inline constexpr std::size_t kMaxConfigurations = 4096;

} // namespace collapse
