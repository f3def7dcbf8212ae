#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <variant>

namespace orgsim {

// Seed derivation
//
// Every named stream gets its own generator seeded from
//   derive_seed(base_seed, name) = mix(mix(base_seed) ^ fnv1a64(name))
// where mix is the splitmix64 finaliser. Replication i of a plan runs with
//   replication_seed(base_seed, i) = mix(mix(base_seed) + (i + 1) * 0x9E3779B97F4A7C15)
// and an unpaired second configuration uses replication_seed(base, i, "B"),
// which additionally xors in fnv1a64("B") before the final mix.

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view stream_name) noexcept;
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index,
                               std::string_view tag) noexcept;

/// A single named substream. Backed by std::mt19937_64; uniforms are built
/// from the top 53 bits so the sequence is fully specified.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// Lazily created named substreams. A stream's sequence depends only on
/// (base_seed, name), so the order in which streams are first used is
/// irrelevant.
class RngStreams {
public:
    explicit RngStreams(std::uint64_t base_seed) : base_seed_(base_seed) {}

    std::uint64_t base_seed() const noexcept { return base_seed_; }
    RandomStream& stream(std::string_view name);
    std::size_t stream_count() const noexcept { return streams_.size(); }

private:
    std::uint64_t base_seed_;
    std::map<std::string, RandomStream, std::less<>> streams_;
};

namespace dist {
struct Constant {
    double value;
};
struct Uniform {
    double a;
    double b;
};
struct Exponential {
    double mean;
};
struct Triangular {
    double a;
    double mode;
    double b;
};
struct Bernoulli {
    double p;
};
}  // namespace dist

using Distribution =
    std::variant<dist::Constant, dist::Uniform, dist::Exponential, dist::Triangular, dist::Bernoulli>;

/// Throws BadDistributionParams when parameters violate their domain.
void validate_distribution(const Distribution& d);

/// Draws one value. Inversion methods: uniform a + (b - a) u; exponential
/// -mean * log(1 - u); triangular by its piecewise inverse CDF; bernoulli
/// u < p. Constants return the value and consume no draw.
double sample(RandomStream& stream, const Distribution& d);

/// Draws from the named stream only; other streams are untouched.
double draw_sample(RngStreams& streams, std::string_view stream_name, const Distribution& d);

double distribution_mean(const Distribution& d);
std::string describe(const Distribution& d);

}  // namespace orgsim
