#include "scoredens/rng.hpp"

#include <cmath>

namespace scoredens {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Stafford mix13).
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

RandomStream RandomStream::derive(std::uint64_t index) const {
  return RandomStream(mix64(key_ ^ mix64((index + 1) * 0xda942042e4dd58b5ULL)), 0);
}

RandomStream RandomStream::derive(std::string_view tag) const {
  return derive(fnv1a(tag));
}

std::uint64_t RandomStream::next_u64() {
  return mix64(key_ + (++counter_) * kGolden);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double a, double b) {
  return a + (b - a) * uniform();
}

double RandomStream::normal() {
  // Shift u1 into (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

Eigen::VectorXd RandomStream::normal_vector(Eigen::Index d) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
  return v;
}

std::size_t RandomStream::index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace scoredens
