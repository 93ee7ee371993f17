#pragma once

// PCG32 (XSH-RR: 64-bit LCG state, 32-bit permuted output) golden model,
// its RTL datapath, and a RANDU negative control.

#include <cstdint>
#include <string>
#include <vector>

#include "pcgwb/rtl.hpp"

namespace pcgwb::pcg {

inline constexpr std::uint64_t kDefaultMultiplier = 0x5851F42D4C957F2DULL;
inline constexpr std::uint64_t kDefaultIncrement = 0x14057B7EF767814FULL;

struct PcgConfig {
  std::uint64_t seed = 0;
  std::uint64_t multiplier = kDefaultMultiplier;
  std::uint64_t increment = kDefaultIncrement;

  bool operator==(const PcgConfig&) const = default;
};

/// XSH-RR output permutation of a 64-bit state.
constexpr std::uint32_t permute(std::uint64_t state) noexcept {
  const auto xorshifted = static_cast<std::uint32_t>(((state >> 18) ^ state) >> 27);
  const auto rot = static_cast<unsigned>(state >> 59);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

struct Step {
  std::uint64_t new_state;
  std::uint32_t output;  // permutation of the pre-update state
};

constexpr Step golden_next(std::uint64_t state, std::uint64_t multiplier,
                           std::uint64_t increment) noexcept {
  return {state * multiplier + increment, permute(state)};
}

/// Stateful golden model. The first output is the permutation of the seed.
class PcgGolden {
 public:
  explicit PcgGolden(const PcgConfig& config) : config_(config), state_(config.seed) {}

  std::uint32_t next() noexcept {
    const Step s = golden_next(state_, config_.multiplier, config_.increment);
    state_ = s.new_state;
    return s.output;
  }

  std::uint64_t state() const noexcept { return state_; }
  const PcgConfig& config() const noexcept { return config_; }

 private:
  PcgConfig config_;
  std::uint64_t state_;
};

std::vector<std::uint32_t> golden_stream(const PcgConfig& config, std::size_t n);

/// x_{k+1} = 65539 * x_k mod 2^31; yields x_1 .. x_n.
std::vector<std::uint32_t> randu_stream(std::uint32_t seed, std::size_t n);

class Randu {
 public:
  explicit Randu(std::uint32_t seed) : x_(seed & 0x7FFFFFFFu) {}
  std::uint32_t next() noexcept {
    x_ = static_cast<std::uint32_t>((std::uint64_t{65539} * x_) & 0x7FFFFFFFu);
    return x_;
  }

 private:
  std::uint32_t x_;
};

enum class ConfigWarning { EvenIncrement, EvenMultiplier, ZeroMultiplier };

const char* to_string(ConfigWarning w) noexcept;

/// Flags parameter choices that shorten the period. Never alters the config.
std::vector<ConfigWarning> validate_config(const PcgConfig& config);

/// Adds the XSH-RR permutation of `state` to the design as named signals
/// (`xorshifted`, `rot`) and returns the 32-bit output expression.
rtl::Expr build_permutation(rtl::RtlDesign& design, const rtl::Signal& state);

/// Standalone generator: 64-bit `state` register (reset = seed) advanced every
/// cycle, constant `seed`/`multiplier`/`increment` signals and a 32-bit
/// `output` port.
rtl::RtlDesign build_pcg_rtl(const PcgConfig& config, const std::string& name = "pcg32");

}  // namespace pcgwb::pcg
