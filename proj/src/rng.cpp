#include "orgsim/rng.hpp"

#include "orgsim/detail/overloaded.hpp"
#include "orgsim/errors.hpp"

#include <cmath>
#include <sstream>

namespace orgsim {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view stream_name) noexcept {
    return splitmix64(splitmix64(base_seed) ^ fnv1a64(stream_name));
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base_seed) + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index,
                               std::string_view tag) noexcept {
    return splitmix64((splitmix64(base_seed) + (index + 1) * 0x9E3779B97F4A7C15ULL) ^
                      fnv1a64(tag));
}

RandomStream& RngStreams::stream(std::string_view name) {
    auto it = streams_.find(name);
    if (it == streams_.end()) {
        it = streams_.emplace(std::string(name), RandomStream(derive_seed(base_seed_, name))).first;
    }
    return it->second;
}

namespace {

using detail::overloaded;

void require(bool ok, const Distribution& d, const char* why) {
    if (!ok) {
        throw BadDistributionParams(describe(d) + ": " + why);
    }
}

}  // namespace

void validate_distribution(const Distribution& d) {
    std::visit(overloaded{
                   [&](const dist::Constant& c) { require(std::isfinite(c.value), d, "value must be finite"); },
                   [&](const dist::Uniform& u) {
                       require(std::isfinite(u.a) && std::isfinite(u.b), d, "bounds must be finite");
                       require(u.a <= u.b, d, "requires a <= b");
                   },
                   [&](const dist::Exponential& e) {
                       require(std::isfinite(e.mean) && e.mean > 0.0, d, "requires mean > 0");
                   },
                   [&](const dist::Triangular& t) {
                       require(std::isfinite(t.a) && std::isfinite(t.b) && std::isfinite(t.mode), d,
                               "parameters must be finite");
                       require(t.a <= t.mode && t.mode <= t.b, d, "requires a <= mode <= b");
                   },
                   [&](const dist::Bernoulli& b) { require(b.p >= 0.0 && b.p <= 1.0, d, "requires 0 <= p <= 1"); },
               },
               d);
}

double sample(RandomStream& stream, const Distribution& d) {
    validate_distribution(d);
    return std::visit(overloaded{
                          [](const dist::Constant& c) { return c.value; },
                          [&](const dist::Uniform& u) { return u.a + (u.b - u.a) * stream.uniform01(); },
                          [&](const dist::Exponential& e) { return -e.mean * std::log1p(-stream.uniform01()); },
                          [&](const dist::Triangular& t) {
                              const double u = stream.uniform01();
                              const double width = t.b - t.a;
                              if (width <= 0.0) {
                                  return t.a;
                              }
                              const double split = (t.mode - t.a) / width;
                              if (u < split) {
                                  return t.a + std::sqrt(u * width * (t.mode - t.a));
                              }
                              return t.b - std::sqrt((1.0 - u) * width * (t.b - t.mode));
                          },
                          [&](const dist::Bernoulli& b) { return stream.uniform01() < b.p ? 1.0 : 0.0; },
                      },
                      d);
}

double draw_sample(RngStreams& streams, std::string_view stream_name, const Distribution& d) {
    return sample(streams.stream(stream_name), d);
}

double distribution_mean(const Distribution& d) {
    return std::visit(overloaded{
                          [](const dist::Constant& c) { return c.value; },
                          [](const dist::Uniform& u) { return 0.5 * (u.a + u.b); },
                          [](const dist::Exponential& e) { return e.mean; },
                          [](const dist::Triangular& t) { return (t.a + t.mode + t.b) / 3.0; },
                          [](const dist::Bernoulli& b) { return b.p; },
                      },
                      d);
}

std::string describe(const Distribution& d) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const dist::Constant& c) { os << "constant(" << c.value << ")"; },
                   [&](const dist::Uniform& u) { os << "uniform(" << u.a << "," << u.b << ")"; },
                   [&](const dist::Exponential& e) { os << "exponential(mean=" << e.mean << ")"; },
                   [&](const dist::Triangular& t) {
                       os << "triangular(" << t.a << "," << t.mode << "," << t.b << ")";
                   },
                   [&](const dist::Bernoulli& b) { os << "bernoulli(" << b.p << ")"; },
               },
               d);
    return os.str();
}

}  // namespace orgsim
