#pragma once

#include <cstdint>
#include <limits>

namespace tcs {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the k-th output is a pure function of (key, k), so a
// stream can be created anywhere, by any worker, in O(1). Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    return mix64(key_ + kGamma * ++counter_);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t position() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class StreamRole : std::uint8_t { umbrella = 1, array_specific = 2, idiosyncratic = 3 };

// Identifies one component draw. `array` is ignored for umbrella shocks,
// `family` for idiosyncratic components; `index` is the subset or cell id.
struct StreamLabel {
  StreamRole role = StreamRole::idiosyncratic;
  std::uint32_t array = 0;
  std::uint32_t family = 0;
  std::uint64_t index = 0;
  std::uint64_t replication = 0;
};

constexpr std::uint64_t stream_key(std::uint64_t seed,
                                   const StreamLabel& label) noexcept {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ static_cast<std::uint64_t>(label.role));
  h = mix64(h ^ label.array);
  h = mix64(h ^ label.family);
  h = mix64(h ^ label.index);
  h = mix64(h ^ label.replication);
  return h;
}

constexpr RandomStream make_stream(std::uint64_t seed,
                                   const StreamLabel& label) noexcept {
  return RandomStream(stream_key(seed, label));
}

}  // namespace tcs
