#pragma once

// Wishbone B4 classic-cycle slave wrapping the PCG datapath, plus a bus
// master model that drives it inside the simulator.
//
// Register map (byte offsets, decoded from wbs_adr_i[7:0]):
//   0x00 OUTPUT   read-only, current permuted output
//   0x04 SEED_LO  0x08 SEED_HI
//   0x0C MULT_LO  0x10 MULT_HI
//   0x14 INC_LO   0x18 INC_HI
//   0x1C CTRL     bit0 LOAD (strobe, state <= seed), bit1 ENABLE (reset 1)
// Unmapped offsets read as zero and ignore writes.
//
// The slave acks one cycle after it sees cyc & stb, for exactly one cycle.
// Writes commit on the ack cycle. The generator holds while a CTRL write is
// on the bus, so an ENABLE/disable write pair separated by one idle cycle
// advances the state exactly once.

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcgwb/pcg.hpp"
#include "pcgwb/rtl.hpp"
#include "pcgwb/sim.hpp"
#include "pcgwb/vcd.hpp"

namespace pcgwb::wb {

namespace reg {
inline constexpr std::uint32_t kOutput = 0x00;
inline constexpr std::uint32_t kSeedLo = 0x04;
inline constexpr std::uint32_t kSeedHi = 0x08;
inline constexpr std::uint32_t kMultLo = 0x0C;
inline constexpr std::uint32_t kMultHi = 0x10;
inline constexpr std::uint32_t kIncLo = 0x14;
inline constexpr std::uint32_t kIncHi = 0x18;
inline constexpr std::uint32_t kCtrl = 0x1C;
}  // namespace reg

inline constexpr std::uint32_t kCtrlLoad = 1u << 0;
inline constexpr std::uint32_t kCtrlEnable = 1u << 1;

/// Offsets whose full 32-bit value reads back after a write.
inline constexpr std::uint32_t kDataRegisters[] = {reg::kSeedLo, reg::kSeedHi, reg::kMultLo,
                                                   reg::kMultHi, reg::kIncLo,  reg::kIncHi};

inline constexpr const char* kModuleName = "RNG";
inline constexpr const char* kClock = "wb_clk_i";
inline constexpr const char* kReset = "wb_rst_i";

/// Master acks must arrive within this many cycles of asserting a request.
inline constexpr std::uint64_t kAckTimeout = 16;

struct PortSpec {
  std::string name;
  rtl::Direction direction;
  unsigned width;
};

/// The Caravel user-project Wishbone slave roster, clock and reset included.
const std::vector<PortSpec>& wb_port_set();

rtl::RtlDesign build_rng_with_wishbone(const pcg::PcgConfig& config);

struct Transaction {
  enum class Kind { Read, Write, Idle };
  Kind kind = Kind::Read;
  std::uint32_t offset = 0;
  std::uint32_t value = 0;  // write data, or idle cycle count

  static Transaction read(std::uint32_t offset) { return {Kind::Read, offset, 0}; }
  static Transaction write(std::uint32_t offset, std::uint32_t value) {
    return {Kind::Write, offset, value};
  }
  static Transaction idle(std::uint32_t cycles) { return {Kind::Idle, 0, cycles}; }
};

struct TranscriptEntry {
  std::uint32_t offset;
  Transaction::Kind kind;  // Read or Write
  std::uint32_t value;     // data read, or data written
  std::uint64_t ack_cycle;

  bool operator==(const TranscriptEntry&) const = default;
};

using Transcript = std::vector<TranscriptEntry>;

/// `R 0x00 -> 0x1234abcd` or `W 0x04 <= 0x00000000`.
std::string format_entry(const TranscriptEntry& entry);
std::string format_transcript(const Transcript& transcript);

class WbTimeout : public std::runtime_error {
 public:
  WbTimeout(const Transaction& txn, std::uint64_t cycle);
  const Transaction& transaction() const noexcept { return txn_; }

 private:
  Transaction txn_;
};

/// Port handles for a design that carries the Wishbone slave roster.
struct WbPorts {
  rtl::SignalId cyc, stb, we, sel, adr, dat_i, ack, dat_o;
  explicit WbPorts(const rtl::RtlDesign& design);
};

/// Classic-cycle bus master. Holds cyc/stb until it sees ack, then idles
/// for one cycle before starting the next transaction.
class WbMaster {
 public:
  explicit WbMaster(const rtl::RtlDesign& design) : ports_(design) {}

  void submit(const Transaction& txn) { queue_.push_back(txn); }
  bool busy() const noexcept { return active_.has_value() || !queue_.empty(); }
  /// Completed reads and writes, in order.
  std::deque<TranscriptEntry>& completed() noexcept { return completed_; }
  /// Set when a request went unacknowledged for kAckTimeout cycles.
  const std::optional<std::pair<Transaction, std::uint64_t>>& timed_out() const noexcept {
    return timed_out_;
  }

  void operator()(sim::ProcessContext& ctx);

 private:
  void release(sim::ProcessContext& ctx);

  WbPorts ports_;
  std::deque<Transaction> queue_;
  std::optional<Transaction> active_;
  std::uint64_t started_ = 0;
  std::uint32_t idle_left_ = 0;
  std::deque<TranscriptEntry> completed_;
  std::optional<std::pair<Transaction, std::uint64_t>> timed_out_;
};

/// Checks ack discipline on every settled cycle: ack only while cyc & stb,
/// never high on two consecutive cycles.
class AckMonitor {
 public:
  explicit AckMonitor(const rtl::RtlDesign& design) : ports_(design) {}
  void observe(const sim::Simulator& sim);

  std::uint64_t pulses() const noexcept { return pulses_; }
  std::uint64_t cycles() const noexcept { return cycles_; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  WbPorts ports_;
  bool last_ack_ = false;
  std::uint64_t pulses_ = 0;
  std::uint64_t cycles_ = 0;
  std::vector<std::string> violations_;
};

/// A simulator running the RNG peripheral, driven by one master, observed by
/// an ack monitor and optionally traced.
class WbHarness {
 public:
  explicit WbHarness(const pcg::PcgConfig& config, bool trace = false);

  sim::Simulator& sim() noexcept { return sim_; }
  WbMaster& master() noexcept { return master_; }
  const AckMonitor& monitor() const noexcept { return monitor_; }
  sim::VcdTrace* trace() noexcept { return trace_ ? &*trace_ : nullptr; }

  /// Advance one clock cycle.
  void tick();
  /// Run queued transactions to completion; throws WbTimeout.
  void drain();
  TranscriptEntry execute(const Transaction& txn);
  /// Sample a final settled state into the trace.
  void finish();

 private:
  sim::Simulator sim_;
  WbMaster master_;
  AckMonitor monitor_;
  std::optional<sim::VcdTrace> trace_;
  bool finished_ = false;
};

/// Classic write; returns the cycles it took. Offset must be word aligned.
std::uint64_t wb_write(WbHarness& bus, std::uint32_t offset, std::uint32_t value);
std::uint32_t wb_read(WbHarness& bus, std::uint32_t offset);

/// Disable, program seed/multiplier/increment, pulse LOAD.
void program_generator(WbHarness& bus, const pcg::PcgConfig& config);
/// Raise ENABLE for exactly one generator step, leaving it disabled.
void single_step(WbHarness& bus);

struct ScenarioResult {
  Transcript transcript;
  std::uint64_t cycles = 0;
  std::uint64_t ack_pulses = 0;
  std::vector<std::string> violations;
  std::optional<sim::VcdTrace> trace;
};

ScenarioResult run_wb_scenario(const std::vector<Transaction>& script,
                               const pcg::PcgConfig& config = {}, bool trace = false);

/// Script that programs `config`, loads it and samples `samples` outputs
/// with single steps in between.
std::vector<Transaction> program_and_sample_script(const pcg::PcgConfig& config,
                                                   std::size_t samples);

}  // namespace pcgwb::wb
