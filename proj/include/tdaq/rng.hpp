#ifndef TDAQ_RNG_HPP
#define TDAQ_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace tdaq {

/// Identity of the random stream, recorded in every artifact that consumed it.
inline constexpr std::string_view kGeneratorId = "mt19937_64+splitmix64/box-muller-v1";

/// Deterministic random source seeded by one 64-bit integer.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distribution transforms are implemented here rather than
/// taken from <random>, because the standard library's distributions are
/// implementation-defined and would make outputs toolchain dependent.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via the Box-Muller transform.
    double normal();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for a sub-task, a pure function of the master seed and the task key.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Stable 64-bit FNV-1a hash of a string.
std::uint64_t hash_string(std::string_view text);

}  // namespace tdaq

#endif
