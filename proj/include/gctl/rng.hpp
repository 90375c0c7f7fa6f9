#pragma once

#include <array>
#include <cstdint>

namespace gctl {

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (key, counter), so a sample addressed by (seed, path, step) is identical
/// no matter which thread produces it or in which order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const;

 private:
  Key key_;
};

/// Standard normal draw addressed by (path, step, component).
double normal_at(const Philox4x32& gen, std::uint64_t path, std::uint64_t step,
                 std::uint32_t component = 0);

/// Uniform draw in (0, 1) addressed the same way, on an independent sub-stream.
double uniform_at(const Philox4x32& gen, std::uint64_t path, std::uint64_t step,
                  std::uint32_t component = 0);

}  // namespace gctl
