#include "pcgwb/pcg.hpp"

namespace pcgwb::pcg {

using namespace pcgwb::rtl;

std::vector<std::uint32_t> golden_stream(const PcgConfig& config, std::size_t n) {
  std::vector<std::uint32_t> out(n);
  PcgGolden g(config);
  for (auto& w : out) w = g.next();
  return out;
}

std::vector<std::uint32_t> randu_stream(std::uint32_t seed, std::size_t n) {
  std::vector<std::uint32_t> out(n);
  Randu r(seed);
  for (auto& w : out) w = r.next();
  return out;
}

const char* to_string(ConfigWarning w) noexcept {
  switch (w) {
    case ConfigWarning::EvenIncrement: return "EvenIncrement";
    case ConfigWarning::EvenMultiplier: return "EvenMultiplier";
    case ConfigWarning::ZeroMultiplier: return "ZeroMultiplier";
  }
  return "?";
}

std::vector<ConfigWarning> validate_config(const PcgConfig& config) {
  std::vector<ConfigWarning> warnings;
  if (config.increment % 2 == 0) warnings.push_back(ConfigWarning::EvenIncrement);
  if (config.multiplier == 0) warnings.push_back(ConfigWarning::ZeroMultiplier);
  if (config.multiplier % 2 == 0) warnings.push_back(ConfigWarning::EvenMultiplier);
  return warnings;
}

Expr build_permutation(RtlDesign& design, const Signal& state) {
  const Signal xorshifted = add_signal(design, "xorshifted", 32);
  const Signal rot = add_signal(design, "rot", 5);
  const Expr s = ref(state);
  assign_comb(design, xorshifted, slice(shr(s ^ shr(s, lit(18, 6)), lit(27, 6)), 0, 32));
  assign_comb(design, rot, slice(s, 59, 5));
  return rotr(ref(xorshifted), ref(rot));
}

RtlDesign build_pcg_rtl(const PcgConfig& config, const std::string& name) {
  RtlDesign d;
  d.name = name;
  const Signal seed = add_signal(d, "seed", 64);
  const Signal state = add_signal(d, "state", 64);
  const Signal multiplier = add_signal(d, "multiplier", 64);
  const Signal increment = add_signal(d, "increment", 64);
  const Signal output = add_output(d, "output", 32);

  assign_comb(d, seed, lit(config.seed, 64));
  assign_comb(d, multiplier, lit(config.multiplier, 64));
  assign_comb(d, increment, lit(config.increment, 64));
  add_register(d, state, ref(state) * ref(multiplier) + ref(increment), config.seed);
  assign_comb(d, output, build_permutation(d, state));
  return d;
}

}  // namespace pcgwb::pcg
