#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sllg/errors.hpp"

namespace sllg {

/// Identity string recorded in run manifests; bump when the draw scheme
/// changes so archived outputs stay attributable.
inline constexpr const char* kGeneratorId = "sllg-splitmix64-boxmuller-v1";

namespace rng {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stateless hash of a structured counter; order-sensitive chaining.
inline uint64_t counter_hash(uint64_t seed, uint64_t replica, uint64_t level,
                             uint64_t step, uint64_t channel, uint64_t slot) {
    uint64_t h = 0x6A09E667F3BCC908ULL;
    h = splitmix64(h ^ seed);
    h = splitmix64(h ^ replica);
    h = splitmix64(h ^ level);
    h = splitmix64(h ^ step);
    h = splitmix64(h ^ channel);
    h = splitmix64(h ^ slot);
    return h;
}

inline double to_unit_open(uint64_t bits) {
    // (0, 1]: never zero, so the log below is safe.
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// One standard normal per counter, via Box-Muller on two hashed uniforms.
inline double gaussian(uint64_t seed, uint64_t replica, uint64_t level,
                       uint64_t step, uint64_t channel) {
    const double u1 = to_unit_open(counter_hash(seed, replica, level, step, channel, 0));
    const double u2 = to_unit_open(counter_hash(seed, replica, level, step, channel, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rng

struct SeedDescriptor {
    uint64_t base_seed = 1;
    uint64_t replica = 0;
};

/// Brownian increments for all channels on a uniform step grid. Paths are a
/// pure function of (base_seed, replica, refinement level, step, channel), so
/// replicas are independent of evaluation order and machine parallelism.
///
/// refine() produces the standard conditional midpoint split: fine increments
/// sum pairwise to the coarse ones, and the midpoint displacements are fresh
/// draws keyed by the next level. This couples a whole dyadic ladder of step
/// sizes to one underlying path.
class WienerPath {
  public:
    static WienerPath generate(SeedDescriptor seed, double dt, long steps, int channels) {
        if (!(dt > 0.0)) throw ConfigError("wiener: dt must be > 0");
        if (steps < 0) throw ConfigError("wiener: steps must be >= 0");
        if (channels < 0) throw ConfigError("wiener: channels must be >= 0");
        WienerPath p;
        p.seed_ = seed;
        p.dt_ = dt;
        p.steps_ = steps;
        p.channels_ = channels;
        p.level_ = 0;
        p.dw_.resize(static_cast<size_t>(steps) * channels);
        const double sdt = std::sqrt(dt);
        for (long m = 0; m < steps; ++m)
            for (int j = 0; j < channels; ++j)
                p.dw_[static_cast<size_t>(m) * channels + j] =
                    sdt * rng::gaussian(seed.base_seed, seed.replica, 0,
                                        static_cast<uint64_t>(m), static_cast<uint64_t>(j));
        return p;
    }

    WienerPath refine() const {
        WienerPath f;
        f.seed_ = seed_;
        f.dt_ = dt_ / 2.0;
        f.steps_ = steps_ * 2;
        f.channels_ = channels_;
        f.level_ = level_ + 1;
        f.dw_.resize(static_cast<size_t>(f.steps_) * channels_);
        const double half_sd = 0.5 * std::sqrt(dt_);
        for (long m = 0; m < steps_; ++m) {
            for (int j = 0; j < channels_; ++j) {
                const double coarse = dw_[static_cast<size_t>(m) * channels_ + j];
                const double xi =
                    half_sd * rng::gaussian(seed_.base_seed, seed_.replica,
                                            static_cast<uint64_t>(f.level_),
                                            static_cast<uint64_t>(m), static_cast<uint64_t>(j));
                f.dw_[static_cast<size_t>(2 * m) * channels_ + j] = 0.5 * coarse + xi;
                f.dw_[static_cast<size_t>(2 * m + 1) * channels_ + j] = 0.5 * coarse - xi;
            }
        }
        return f;
    }

    double increment(long step, int channel) const {
        return dw_[static_cast<size_t>(step) * channels_ + channel];
    }
    const double* step_increments(long step) const {
        return dw_.data() + static_cast<size_t>(step) * channels_;
    }

    /// W_j(T): total displacement of channel j.
    double channel_total(int channel) const {
        double s = 0.0;
        for (long m = 0; m < steps_; ++m) s += increment(m, channel);
        return s;
    }

    SeedDescriptor seed() const { return seed_; }
    double dt() const { return dt_; }
    long steps() const { return steps_; }
    int channels() const { return channels_; }
    int level() const { return level_; }

  private:
    SeedDescriptor seed_;
    double dt_ = 0.0;
    long steps_ = 0;
    int channels_ = 0;
    int level_ = 0;
    std::vector<double> dw_;
};

} // namespace sllg
