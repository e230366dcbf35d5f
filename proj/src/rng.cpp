#include "appraisal/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "appraisal/errors.hpp"

namespace appraisal {

namespace {

// splitmix64 step; also used to hash labels into child seeds.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::split(std::string_view label, std::uint64_t index) const {
  std::uint64_t child = mix(state_ ^ hash_label(label));
  child = mix(child ^ (index * 0xd6e8feb86659fd93ULL + 1));
  return Rng(child);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // u1 in (0, 1] so the log is finite.
  double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw Error(Errc::bad_dim, "uniform_int requires n >= 1");
  if (n == 1) return 0;
  // Bitmask rejection: unbiased and cheap for our sizes.
  std::uint64_t mask = ~0ULL >> __builtin_clzll(n - 1 | 1);
  for (;;) {
    std::uint64_t v = next() & mask;
    if (v < n) return v;
  }
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t m) {
  if (m > n) m = n;
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates: the first m slots become the sample.
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_int(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace appraisal
