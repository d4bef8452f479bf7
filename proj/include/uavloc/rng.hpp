#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace uavloc {

/// splitmix64 finalizer. Used for child-seed derivation so that per-trial
/// noise streams are a pure function of (master_seed, trial_index).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for trial `t` of a batch seeded with `master`. Adding axis points or
/// estimators never shifts existing trials' noise.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(master ^ splitmix64(trial + 1));
}

/// Portable seeded Gaussian stream: mt19937_64 (fully specified by the
/// standard) driving a Box-Muller transform. std::normal_distribution is
/// implementation-defined, so it is not used here.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    /// One standard normal draw.
    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // uniform in (0,1]; the offset keeps log() finite
        const double u1 =
            (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace uavloc
