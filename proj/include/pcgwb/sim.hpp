#pragma once

// Cycle-accurate two-phase simulation of an RtlDesign.
//
// Each cycle: testbench processes run (seeing the previous cycle's settled
// values), combinational logic settles, the trace samples, then every
// register commits its next value simultaneously.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcgwb/rtl.hpp"

namespace pcgwb::sim {

class VcdTrace;

struct SimState {
  std::uint64_t cycle = 0;
  std::vector<std::uint64_t> values;  // indexed by SignalId
  bool reset = false;

  std::uint64_t operator[](rtl::SignalId id) const { return values.at(id); }
};

/// A process raised an error; `cycle` is when it happened.
class SimFault : public std::runtime_error {
 public:
  SimFault(std::uint64_t cycle, const std::string& what)
      : std::runtime_error("cycle " + std::to_string(cycle) + ": " + what), cycle_(cycle) {}
  std::uint64_t cycle() const noexcept { return cycle_; }

 private:
  std::uint64_t cycle_;
};

class Simulator;

/// Handed to testbench processes once per cycle.
class ProcessContext {
 public:
  std::uint64_t cycle() const noexcept;
  /// Value of any signal as settled in the previous cycle.
  std::uint64_t peek(rtl::SignalId id) const;
  std::uint64_t peek(const rtl::Signal& s) const { return peek(s.id); }
  /// Drive an input port; takes effect in the current cycle.
  void drive(rtl::SignalId id, std::uint64_t value);
  void drive(const rtl::Signal& s, std::uint64_t value) { drive(s.id, value); }
  void set_reset(bool asserted);

 private:
  friend class Simulator;
  explicit ProcessContext(Simulator& sim) : sim_(sim) {}
  Simulator& sim_;
};

using TestbenchProcess = std::function<void(ProcessContext&)>;

class Simulator {
 public:
  /// Validates and compiles the design; throws rtl::RtlError when invalid.
  explicit Simulator(rtl::RtlDesign design);

  const rtl::RtlDesign& design() const noexcept { return design_; }

  void poke(rtl::SignalId id, std::uint64_t value);
  void poke(const rtl::Signal& s, std::uint64_t value) { poke(s.id, value); }
  std::uint64_t peek(rtl::SignalId id) const { return values_.at(id); }
  std::uint64_t peek(const rtl::Signal& s) const { return peek(s.id); }
  std::uint64_t peek(const std::string& name) const { return peek(design_.signal(name).id); }
  /// Value as of the most recent settle (registers before the clock edge).
  std::uint64_t settled(rtl::SignalId id) const { return observed_.at(id); }
  void set_reset(bool asserted) noexcept { reset_ = asserted; }
  bool reset() const noexcept { return reset_; }
  std::uint64_t cycle_count() const noexcept { return cycle_; }

  /// Recompute every combinational signal from registers and inputs.
  void settle();
  /// Commit all register next values at once (reset values while reset is
  /// asserted) and advance the cycle counter. Expects a settled state.
  void step_clock();
  /// One full cycle: processes, settle, trace sample, clock edge.
  void cycle(std::span<const TestbenchProcess> processes = {}, VcdTrace* trace = nullptr);

  SimState state() const;

 private:
  friend class ProcessContext;

  enum class Op : std::uint8_t {
    Copy, Add, Sub, Mul, And, Or, Xor, Shl, Shr, RotR, Not, Slice, ConcatStep, Mux, Eq
  };
  struct Instr {
    Op op;
    unsigned width;
    std::uint32_t dst, a, b, c;
    std::uint64_t imm;  // mask, slice low bit, or concat shift
  };

  std::uint32_t compile(const rtl::Expr& e, std::vector<Instr>& code, std::uint32_t dst);
  std::uint32_t fresh_slot();
  static void execute(const std::vector<Instr>& code, std::uint64_t* slots) noexcept;

  rtl::RtlDesign design_;
  std::vector<bool> is_input_;
  std::vector<std::uint64_t> values_;    // signals first, then temporaries and constants
  std::vector<std::uint64_t> observed_;  // previous settled signal values
  std::vector<Instr> comb_code_;
  std::vector<Instr> next_code_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> commits_;  // next slot -> register
  std::uint64_t cycle_ = 0;
  bool reset_ = false;
};

struct RunResult {
  SimState final_state;
};

/// Simulate `cycles` cycles from reset values, then settle once more so the
/// returned state (and the trace's last sample) reflect the final registers.
RunResult run(const rtl::RtlDesign& design, std::uint64_t cycles,
              std::span<const TestbenchProcess> processes = {}, VcdTrace* trace = nullptr);

}  // namespace pcgwb::sim
