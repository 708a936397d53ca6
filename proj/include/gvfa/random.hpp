#ifndef GVFA_RANDOM_HPP
#define GVFA_RANDOM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gvfa::random {

/// Identifies one reproducible random stream. The same (seed, stream_index)
/// always reproduces the same draws within one build of this library;
/// distinct stream indices give statistically independent streams, so
/// concurrent trials never share generator state.
struct SeededStream {
    std::uint64_t seed = 0xC0FFEE;
    std::uint64_t stream_index = 0;
};

enum class VectorFamily { Gaussian, Binary, Polynomial };

/// A sampled projection vector together with the stream that produced it.
/// `ratio` is populated only for the Polynomial family.
struct ProjectionVector {
    std::vector<double> values;
    VectorFamily family = VectorFamily::Gaussian;
    SeededStream provenance;
    double ratio = 0.0;
};

/// Counter-seeded xoshiro256++ with a polar Box-Muller normal sampler.
/// Integer state transitions only, so sequences are identical across
/// platforms for a given (seed, stream_index).
class RandomStream {
public:
    explicit RandomStream(SeededStream provenance);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi);

    /// Standard normal draw (polar Box-Muller; pairs are cached).
    double gaussian();

    /// Fair coin.
    bool bit();

private:
    std::array<std::uint64_t, 4> state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// n i.i.d. standard-normal entries. Throws std::domain_error for n == 0.
ProjectionVector sample_gaussian(std::size_t n, SeededStream stream);

/// n i.i.d. fair 0.0/1.0 entries. Throws std::domain_error for n == 0.
ProjectionVector sample_binary(std::size_t n, SeededStream stream);

/// (1, r, r^2, ..., r^{n-1}) with r drawn uniform on [0.5, 1.5]. Throws
/// std::domain_error for n == 0 and std::range_error if any power leaves
/// the representable range (overflow or underflow to zero).
ProjectionVector sample_polynomial(std::size_t n, SeededStream stream);

/// Deterministic power ladder for a caller-chosen ratio; the test hook
/// behind sample_polynomial. Same range checks.
std::vector<double> polynomial_powers(std::size_t n, double ratio);

}  // namespace gvfa::random

#endif  // GVFA_RANDOM_HPP
