#pragma once

#include <cstdint>
#include <cmath>

namespace fluct {

// Counter-based splittable random stream. Every draw is a pure function of
// (key, counter), so a replica's noise sequence depends only on how the
// stream was derived, never on scheduling. Derivation chain:
//   master(seed) -> substream(replica) -> substream(step) -> draws.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    static RngStream master(std::uint64_t seed) {
        return RngStream(mix(seed ^ 0x7c1592ac5e8d3a61ULL));
    }

    RngStream substream(std::uint64_t index) const {
        return RngStream(mix(key_ ^ mix(index + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64() {
        return mix(key_ + 0x9e3779b97f4a7c15ULL * (++counter_));
    }

    // Uniform in the open interval (0, 1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; draws come in generated pairs.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = kTau * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t key() const { return key_; }

  private:
    static constexpr double kTau = 6.283185307179586476925286766559;

    // SplitMix64 finalizer (Stafford mix13).
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace fluct
