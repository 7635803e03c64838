#pragma once

#include <cstdint>
#include <random>

namespace causalts {

// Seeded random stream. Substreams are derived by hashing (seed, index) so
// that parallel consumers (chains, replications) get independent streams
// whose draws do not depend on scheduling order.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_hash_(mix(seed)), engine_(seed_hash_) {}

    double normal() { return normal_(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
    double gamma(double shape, double scale) {
        std::gamma_distribution<double> g(shape, scale);
        return g(engine_);
    }
    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
    std::uint64_t next_u64() { return engine_(); }

    // Inverse-gamma(shape, scale) via the reciprocal of a gamma variate.
    double inverse_gamma(double shape, double scale) {
        return scale / gamma(shape, 1.0);
    }

    RngStream substream(std::uint64_t index) const {
        return RngStream(seed_hash_ ^ mix(index + 1));
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_hash_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace causalts
