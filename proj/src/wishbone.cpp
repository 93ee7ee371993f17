#include "pcgwb/wishbone.hpp"

#include <fmt/format.h>

namespace pcgwb::wb {

using namespace pcgwb::rtl;

const std::vector<PortSpec>& wb_port_set() {
  static const std::vector<PortSpec> ports = {
      {kClock, Direction::In, 1},        {kReset, Direction::In, 1},
      {"wbs_stb_i", Direction::In, 1},   {"wbs_cyc_i", Direction::In, 1},
      {"wbs_we_i", Direction::In, 1},    {"wbs_sel_i", Direction::In, 4},
      {"wbs_dat_i", Direction::In, 32},  {"wbs_adr_i", Direction::In, 32},
      {"wbs_ack_o", Direction::Out, 1},  {"wbs_dat_o", Direction::Out, 32},
  };
  return ports;
}

namespace {

// 64-bit register split into two bus-writable halves.
Expr split_write(const Signal& reg, const Expr& write_lo, const Expr& write_hi,
                 const Expr& data) {
  const Expr r = ref(reg);
  return mux(write_lo, concat({slice(r, 32, 32), data}),
             mux(write_hi, concat({data, slice(r, 0, 32)}), r));
}

}  // namespace

RtlDesign build_rng_with_wishbone(const pcg::PcgConfig& config) {
  RtlDesign d;
  d.name = kModuleName;

  // Clock and reset are implicit; the backend emits them as wb_clk_i/wb_rst_i.
  const Signal stb = add_input(d, "wbs_stb_i", 1);
  const Signal cyc = add_input(d, "wbs_cyc_i", 1);
  const Signal we = add_input(d, "wbs_we_i", 1);
  add_input(d, "wbs_sel_i", 4);  // byte lanes ignored: full-word access only
  const Signal dat_i = add_input(d, "wbs_dat_i", 32);
  const Signal adr = add_input(d, "wbs_adr_i", 32);
  const Signal ack = add_output(d, "wbs_ack_o", 1);
  const Signal dat_o = add_output(d, "wbs_dat_o", 32);

  const Signal seed = add_signal(d, "seed", 64);
  const Signal state = add_signal(d, "state", 64);
  const Signal multiplier = add_signal(d, "multiplier", 64);
  const Signal increment = add_signal(d, "increment", 64);
  const Signal output = add_signal(d, "output", 32);
  const Signal enable = add_signal(d, "enable", 1);

  const Signal offset = add_signal(d, "offset", 8);
  const Signal request = add_signal(d, "request", 1);
  const Signal commit = add_signal(d, "write_commit", 1);
  const Signal ctrl_hold = add_signal(d, "ctrl_hold", 1);
  const Signal load = add_signal(d, "load", 1);
  const Signal advance = add_signal(d, "advance", 1);
  const Signal read_data = add_signal(d, "read_data", 32);

  auto at = [&](std::uint32_t off) { return eq(ref(offset), lit(off, 8)); };
  auto write_to = [&](std::uint32_t off) { return ref(commit) & at(off); };

  assign_comb(d, offset, slice(ref(adr), 0, 8));
  assign_comb(d, request, ref(cyc) & ref(stb));
  assign_comb(d, commit, ref(request) & ref(we) & ref(ack));
  assign_comb(d, ctrl_hold, ref(request) & ref(we) & at(reg::kCtrl));
  assign_comb(d, load, write_to(reg::kCtrl) & slice(ref(dat_i), 0, 1));
  assign_comb(d, advance, ref(enable) & ~ref(ctrl_hold));

  add_register(d, ack, ref(request) & ~ref(ack), 0);
  add_register(d, seed, split_write(seed, write_to(reg::kSeedLo), write_to(reg::kSeedHi), ref(dat_i)),
               config.seed);
  add_register(d, multiplier,
               split_write(multiplier, write_to(reg::kMultLo), write_to(reg::kMultHi), ref(dat_i)),
               config.multiplier);
  add_register(d, increment,
               split_write(increment, write_to(reg::kIncLo), write_to(reg::kIncHi), ref(dat_i)),
               config.increment);
  add_register(d, enable, mux(write_to(reg::kCtrl), slice(ref(dat_i), 1, 1), ref(enable)), 1);
  add_register(d, state,
               mux(ref(load), ref(seed),
                   mux(ref(advance), ref(state) * ref(multiplier) + ref(increment), ref(state))),
               config.seed);

  assign_comb(d, output, pcg::build_permutation(d, state));

  const Expr ctrl_value = concat({lit(0, 30), ref(enable), lit(0, 1)});
  const std::pair<std::uint32_t, Expr> readable[] = {
      {reg::kOutput, ref(output)},
      {reg::kSeedLo, slice(ref(seed), 0, 32)},
      {reg::kSeedHi, slice(ref(seed), 32, 32)},
      {reg::kMultLo, slice(ref(multiplier), 0, 32)},
      {reg::kMultHi, slice(ref(multiplier), 32, 32)},
      {reg::kIncLo, slice(ref(increment), 0, 32)},
      {reg::kIncHi, slice(ref(increment), 32, 32)},
      {reg::kCtrl, ctrl_value},
  };
  Expr selected = lit(0, 32);
  for (auto it = std::rbegin(readable); it != std::rend(readable); ++it) {
    selected = mux(at(it->first), it->second, selected);
  }
  assign_comb(d, read_data, selected);
  assign_comb(d, dat_o, mux(ref(ack), ref(read_data), lit(0, 32)));
  return d;
}

std::string format_entry(const TranscriptEntry& e) {
  if (e.kind == Transaction::Kind::Write) {
    return fmt::format("W 0x{:02x} <= 0x{:08x}", e.offset, e.value);
  }
  return fmt::format("R 0x{:02x} -> 0x{:08x}", e.offset, e.value);
}

std::string format_transcript(const Transcript& transcript) {
  std::string out;
  for (const auto& e : transcript) {
    out += format_entry(e);
    out += '\n';
  }
  return out;
}

namespace {
const char* kind_name(Transaction::Kind k) {
  switch (k) {
    case Transaction::Kind::Read: return "read";
    case Transaction::Kind::Write: return "write";
    case Transaction::Kind::Idle: return "idle";
  }
  return "?";
}
}  // namespace

WbTimeout::WbTimeout(const Transaction& txn, std::uint64_t cycle)
    : std::runtime_error(fmt::format("no ack for {} at offset 0x{:02x} within {} cycles (cycle {})",
                                     kind_name(txn.kind), txn.offset, kAckTimeout, cycle)),
      txn_(txn) {}

WbPorts::WbPorts(const RtlDesign& design)
    : cyc(design.signal("wbs_cyc_i").id),
      stb(design.signal("wbs_stb_i").id),
      we(design.signal("wbs_we_i").id),
      sel(design.signal("wbs_sel_i").id),
      adr(design.signal("wbs_adr_i").id),
      dat_i(design.signal("wbs_dat_i").id),
      ack(design.signal("wbs_ack_o").id),
      dat_o(design.signal("wbs_dat_o").id) {}

void WbMaster::release(sim::ProcessContext& ctx) {
  ctx.drive(ports_.cyc, 0);
  ctx.drive(ports_.stb, 0);
  ctx.drive(ports_.we, 0);
}

void WbMaster::operator()(sim::ProcessContext& ctx) {
  if (active_) {
    if (ctx.peek(ports_.ack) == 1) {
      const bool is_read = active_->kind == Transaction::Kind::Read;
      completed_.push_back({active_->offset, active_->kind,
                            is_read ? static_cast<std::uint32_t>(ctx.peek(ports_.dat_o))
                                    : active_->value,
                            ctx.cycle() - 1});
      active_.reset();
      release(ctx);
      return;
    }
    if (ctx.cycle() - started_ > kAckTimeout) {
      timed_out_.emplace(*active_, ctx.cycle());
      active_.reset();
      queue_.clear();
      release(ctx);
    }
    return;
  }

  while (idle_left_ == 0 && !queue_.empty() && queue_.front().kind == Transaction::Kind::Idle) {
    idle_left_ = queue_.front().value;
    queue_.pop_front();
  }
  if (idle_left_ > 0) {
    --idle_left_;
    release(ctx);
    return;
  }
  if (queue_.empty()) {
    release(ctx);
    return;
  }

  const Transaction txn = queue_.front();
  queue_.pop_front();
  if (txn.offset % 4 != 0) {
    throw std::invalid_argument(fmt::format("unaligned Wishbone offset 0x{:x}", txn.offset));
  }
  const bool write = txn.kind == Transaction::Kind::Write;
  ctx.drive(ports_.cyc, 1);
  ctx.drive(ports_.stb, 1);
  ctx.drive(ports_.we, write ? 1 : 0);
  ctx.drive(ports_.sel, 0xF);
  ctx.drive(ports_.adr, txn.offset);
  ctx.drive(ports_.dat_i, write ? txn.value : 0);
  active_ = txn;
  started_ = ctx.cycle();
}

void AckMonitor::observe(const sim::Simulator& sim) {
  const bool ack = sim.settled(ports_.ack) == 1;
  const bool request = sim.settled(ports_.cyc) == 1 && sim.settled(ports_.stb) == 1;
  const std::uint64_t cycle = sim.cycle_count() - 1;
  if (ack && !request) {
    violations_.push_back(fmt::format("cycle {}: ack without cyc & stb", cycle));
  }
  if (ack && last_ack_) {
    violations_.push_back(fmt::format("cycle {}: ack held for more than one cycle", cycle));
  }
  if (ack && !last_ack_) ++pulses_;
  last_ack_ = ack;
  ++cycles_;
}

WbHarness::WbHarness(const pcg::PcgConfig& config, bool trace)
    : sim_(build_rng_with_wishbone(config)), master_(sim_.design()), monitor_(sim_.design()) {
  if (trace) trace_.emplace(sim_.design());
}

void WbHarness::tick() {
  const sim::TestbenchProcess process = [this](sim::ProcessContext& ctx) { master_(ctx); };
  sim_.cycle({&process, 1}, trace());
  monitor_.observe(sim_);
}

void WbHarness::drain() {
  while (master_.busy()) {
    tick();
    if (const auto& t = master_.timed_out()) throw WbTimeout(t->first, t->second);
  }
}

TranscriptEntry WbHarness::execute(const Transaction& txn) {
  if (txn.kind == Transaction::Kind::Idle) {
    throw std::invalid_argument("execute() takes reads and writes; use tick() to idle");
  }
  master_.submit(txn);
  drain();
  TranscriptEntry e = master_.completed().back();
  master_.completed().pop_back();
  return e;
}

void WbHarness::finish() {
  if (finished_) return;
  finished_ = true;
  sim_.settle();
  if (trace_) trace_->sample(sim_.cycle_count(), sim_.state().values);
}

std::uint64_t wb_write(WbHarness& bus, std::uint32_t offset, std::uint32_t value) {
  const std::uint64_t start = bus.sim().cycle_count();
  bus.execute(Transaction::write(offset, value));
  return bus.sim().cycle_count() - start;
}

std::uint32_t wb_read(WbHarness& bus, std::uint32_t offset) {
  return bus.execute(Transaction::read(offset)).value;
}

namespace {

void append_program(std::vector<Transaction>& s, const pcg::PcgConfig& c) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  s.push_back(Transaction::write(reg::kCtrl, 0));
  s.push_back(Transaction::write(reg::kSeedLo, lo(c.seed)));
  s.push_back(Transaction::write(reg::kSeedHi, hi(c.seed)));
  s.push_back(Transaction::write(reg::kMultLo, lo(c.multiplier)));
  s.push_back(Transaction::write(reg::kMultHi, hi(c.multiplier)));
  s.push_back(Transaction::write(reg::kIncLo, lo(c.increment)));
  s.push_back(Transaction::write(reg::kIncHi, hi(c.increment)));
  s.push_back(Transaction::write(reg::kCtrl, kCtrlLoad));
}

void append_single_step(std::vector<Transaction>& s) {
  s.push_back(Transaction::write(reg::kCtrl, kCtrlEnable));
  s.push_back(Transaction::write(reg::kCtrl, 0));
}

}  // namespace

void program_generator(WbHarness& bus, const pcg::PcgConfig& config) {
  std::vector<Transaction> script;
  append_program(script, config);
  for (const auto& t : script) bus.execute(t);
}

void single_step(WbHarness& bus) {
  std::vector<Transaction> script;
  append_single_step(script);
  for (const auto& t : script) bus.execute(t);
}

std::vector<Transaction> program_and_sample_script(const pcg::PcgConfig& config,
                                                   std::size_t samples) {
  std::vector<Transaction> script;
  append_program(script, config);
  for (std::size_t i = 0; i < samples; ++i) {
    if (i != 0) append_single_step(script);
    script.push_back(Transaction::read(reg::kOutput));
  }
  return script;
}

ScenarioResult run_wb_scenario(const std::vector<Transaction>& script,
                               const pcg::PcgConfig& config, bool trace) {
  WbHarness bus(config, trace);
  for (const auto& t : script) bus.master().submit(t);
  bus.drain();
  bus.finish();
  ScenarioResult result;
  result.transcript.assign(bus.master().completed().begin(), bus.master().completed().end());
  result.cycles = bus.sim().cycle_count();
  result.ack_pulses = bus.monitor().pulses();
  result.violations = bus.monitor().violations();
  if (bus.trace()) result.trace = std::move(*bus.trace());
  return result;
}

}  // namespace pcgwb::wb
