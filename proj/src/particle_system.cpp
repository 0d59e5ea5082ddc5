#include "collapse/particle_system.hpp"

#include "collapse/errors.hpp"

namespace collapse {

ParticleSystem::ParticleSystem(std::vector<Particle> particles, double sigma_variance)
    : particles_(std::move(particles)), sigma_variance_(sigma_variance) {
    if (particles_.empty()) throw ValidationError("ParticleSystem: needs at least one particle");
    if (!(sigma_variance_ > 0.0)) throw ValidationError("ParticleSystem: sigma must be positive");
    sigma_len_ = std::sqrt(sigma_variance_);

    config_count_ = 1;
    slot_offsets_.reserve(particles_.size() + 1);
    slot_offsets_.push_back(0);
    for (const Particle& p : particles_) {
        if (!(p.mass > 0.0)) throw ValidationError("ParticleSystem: masses must be positive");
        if (p.sites.empty()) throw ValidationError("ParticleSystem: each particle needs a site");
        if (config_count_ > kMaxConfigurations / p.sites.size())
            throw ValidationError("ParticleSystem: configuration count exceeds desk-scale cap");
        config_count_ *= p.sites.size();
        slot_offsets_.push_back(slot_offsets_.back() + p.sites.size());
        for (const Vec3& s : p.sites) {
            slot_positions_.push_back(s);
            slot_masses_.push_back(p.mass);
        }
    }
    if (config_count_ < 2)
        throw ValidationError("ParticleSystem: at least two joint configurations required");

    // lexicographic strides, particle 0 slowest
    strides_.assign(particles_.size(), 1);
    for (std::size_t n = particles_.size(); n-- > 1;)
        strides_[n - 1] = strides_[n] * particles_[n].sites.size();
}

std::vector<std::size_t> ParticleSystem::site_indices(std::size_t config_index) const {
    if (config_index >= config_count_)
        throw ValidationError("ParticleSystem: configuration index out of range");
    std::vector<std::size_t> out(particles_.size());
    for (std::size_t n = 0; n < particles_.size(); ++n) {
        out[n] = config_index / strides_[n];
        config_index %= strides_[n];
    }
    return out;
}

std::size_t ParticleSystem::config_index(const std::vector<std::size_t>& sites) const {
    if (sites.size() != particles_.size())
        throw ValidationError("ParticleSystem: wrong site tuple length");
    std::size_t idx = 0;
    for (std::size_t n = 0; n < sites.size(); ++n) {
        if (sites[n] >= particles_[n].sites.size())
            throw ValidationError("ParticleSystem: site index out of range");
        idx += sites[n] * strides_[n];
    }
    return idx;
}

std::size_t ParticleSystem::site_of(std::size_t config_index, std::size_t particle) const {
    return (config_index / strides_[particle]) % particles_[particle].sites.size();
}

std::vector<Vec3> ParticleSystem::configuration_positions(std::size_t config_index) const {
    std::vector<std::size_t> sites = site_indices(config_index);
    std::vector<Vec3> out(particles_.size());
    for (std::size_t n = 0; n < particles_.size(); ++n) out[n] = particles_[n].sites[sites[n]];
    return out;
}

Vec3 ParticleSystem::centroid() const {
    Vec3 c{};
    double mass = 0.0;
    for (std::size_t s = 0; s < slot_positions_.size(); ++s) {
        c = c + slot_masses_[s] * slot_positions_[s];
        mass += slot_masses_[s];
    }
    return (1.0 / mass) * c;
}

double ParticleSystem::max_site_spread() const {
    Vec3 c = centroid();
    double spread = 0.0;
    for (const Vec3& s : slot_positions_) spread = std::max(spread, distance(s, c));
    return spread;
}

} // namespace collapse
