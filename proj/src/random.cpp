#include "gvfa/random.hpp"

#include <cmath>
#include <stdexcept>

namespace gvfa::random {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomStream::RandomStream(SeededStream provenance) {
    // Counter-based derivation: the stream index is folded into the seed
    // through an odd-multiplier mix before state expansion, so distinct
    // trial indices get unrelated generator states without shared state.
    std::uint64_t key = provenance.seed;
    (void)splitmix64(key);
    key ^= provenance.stream_index * 0xD1342543DE82EF95ull + 0x9E3779B97F4A7C15ull;
    for (auto& word : state_) word = splitmix64(key);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RandomStream::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
}

bool RandomStream::bit() { return (next_u64() >> 63) != 0; }

namespace {

void check_length(std::size_t n) {
    if (n == 0) throw std::domain_error("vector length must be positive");
}

}  // namespace

ProjectionVector sample_gaussian(std::size_t n, SeededStream stream) {
    check_length(n);
    RandomStream rng(stream);
    ProjectionVector out;
    out.family = VectorFamily::Gaussian;
    out.provenance = stream;
    out.values.resize(n);
    for (auto& v : out.values) v = rng.gaussian();
    return out;
}

ProjectionVector sample_binary(std::size_t n, SeededStream stream) {
    check_length(n);
    RandomStream rng(stream);
    ProjectionVector out;
    out.family = VectorFamily::Binary;
    out.provenance = stream;
    out.values.resize(n);
    for (auto& v : out.values) v = rng.bit() ? 1.0 : 0.0;
    return out;
}

std::vector<double> polynomial_powers(std::size_t n, double ratio) {
    check_length(n);
    if (!std::isfinite(ratio)) {
        throw std::domain_error("polynomial ratio must be finite");
    }
    std::vector<double> values(n);
    values[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
        values[j] = values[j - 1] * ratio;
        if (!std::isfinite(values[j]) || (values[j] == 0.0 && ratio != 0.0)) {
            throw std::range_error(
                "polynomial power ladder left the representable range at "
                "exponent " +
                std::to_string(j));
        }
    }
    return values;
}

ProjectionVector sample_polynomial(std::size_t n, SeededStream stream) {
    check_length(n);
    RandomStream rng(stream);
    // [0.5, 1.5] keeps r^(n-1) representable far past n = 512 while staying
    // away from the degenerate r = 0.
    const double ratio = rng.uniform(0.5, 1.5);
    ProjectionVector out;
    out.family = VectorFamily::Polynomial;
    out.provenance = stream;
    out.ratio = ratio;
    out.values = polynomial_powers(n, ratio);
    return out;
}

}  // namespace gvfa::random
