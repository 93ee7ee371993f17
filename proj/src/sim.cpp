#include "pcgwb/sim.hpp"

#include <fmt/format.h>

#include "pcgwb/vcd.hpp"

namespace pcgwb::sim {

using rtl::BinaryOp;
using rtl::Expr;
using rtl::width_mask;
namespace node = rtl::node;

namespace {
constexpr std::uint32_t kNoSlot = ~std::uint32_t{0};
}

std::uint64_t ProcessContext::cycle() const noexcept { return sim_.cycle_; }

std::uint64_t ProcessContext::peek(rtl::SignalId id) const { return sim_.observed_.at(id); }

void ProcessContext::drive(rtl::SignalId id, std::uint64_t value) { sim_.poke(id, value); }

void ProcessContext::set_reset(bool asserted) { sim_.set_reset(asserted); }

Simulator::Simulator(rtl::RtlDesign design) : design_(std::move(design)) {
  rtl::require_valid(design_);
  const std::size_t n = design_.signals.size();
  is_input_.assign(n, false);
  for (const auto& p : design_.ports) {
    if (p.direction == rtl::Direction::In) is_input_[p.signal] = true;
  }
  values_.assign(n, 0);
  for (const auto& r : design_.registers) values_[r.target] = r.reset_value;

  for (std::size_t idx : rtl::comb_schedule(design_)) {
    const auto& a = design_.comb_assigns[idx];
    std::uint32_t got = compile(a.expr, comb_code_, a.target);
    if (got != a.target) {
      comb_code_.push_back({Op::Copy, a.expr.width(), a.target, got, 0, 0, 0});
    }
  }
  for (const auto& r : design_.registers) {
    std::uint32_t next_slot = fresh_slot();
    std::uint32_t got = compile(r.next, next_code_, next_slot);
    if (got != next_slot) {
      next_code_.push_back({Op::Copy, r.next.width(), next_slot, got, 0, 0, 0});
    }
    commits_.emplace_back(next_slot, r.target);
  }
  settle();
}

std::uint32_t Simulator::fresh_slot() {
  values_.push_back(0);
  return static_cast<std::uint32_t>(values_.size() - 1);
}

std::uint32_t Simulator::compile(const Expr& e, std::vector<Instr>& code, std::uint32_t dst) {
  const unsigned w = e.width();
  auto out = [&] { return dst != kNoSlot ? dst : fresh_slot(); };
  return std::visit(
      [&](const auto& n) -> std::uint32_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Const>) {
          std::uint32_t s = fresh_slot();
          values_[s] = n.value;
          return s;
        } else if constexpr (std::is_same_v<T, node::Ref>) {
          return n.signal;
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          std::uint32_t a = compile(n.lhs, code, kNoSlot);
          std::uint32_t b = compile(n.rhs, code, kNoSlot);
          Op op = Op::Add;
          switch (n.op) {
            case BinaryOp::Add: op = Op::Add; break;
            case BinaryOp::Sub: op = Op::Sub; break;
            case BinaryOp::Mul: op = Op::Mul; break;
            case BinaryOp::And: op = Op::And; break;
            case BinaryOp::Or: op = Op::Or; break;
            case BinaryOp::Xor: op = Op::Xor; break;
            case BinaryOp::Shl: op = Op::Shl; break;
            case BinaryOp::ShrLogical: op = Op::Shr; break;
            case BinaryOp::RotR: op = Op::RotR; break;
          }
          std::uint32_t d = out();
          code.push_back({op, w, d, a, b, 0, width_mask(w)});
          return d;
        } else if constexpr (std::is_same_v<T, node::Not>) {
          std::uint32_t a = compile(n.operand, code, kNoSlot);
          std::uint32_t d = out();
          code.push_back({Op::Not, w, d, a, 0, 0, width_mask(w)});
          return d;
        } else if constexpr (std::is_same_v<T, node::Slice>) {
          std::uint32_t a = compile(n.operand, code, kNoSlot);
          std::uint32_t d = out();
          code.push_back({Op::Slice, w, d, a, 0, 0, n.low});
          return d;
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          std::uint32_t acc = compile(n.parts.front(), code, kNoSlot);
          if (n.parts.size() == 1) return acc;
          std::uint32_t d = out();
          for (std::size_t i = 1; i < n.parts.size(); ++i) {
            std::uint32_t part = compile(n.parts[i], code, kNoSlot);
            code.push_back({Op::ConcatStep, w, d, acc, part, 0, n.parts[i].width()});
            acc = d;
          }
          return d;
        } else if constexpr (std::is_same_v<T, node::Mux>) {
          std::uint32_t s = compile(n.select, code, kNoSlot);
          std::uint32_t a = compile(n.when_one, code, kNoSlot);
          std::uint32_t b = compile(n.when_zero, code, kNoSlot);
          std::uint32_t d = out();
          code.push_back({Op::Mux, w, d, s, a, b, 0});
          return d;
        } else {
          std::uint32_t a = compile(n.lhs, code, kNoSlot);
          std::uint32_t b = compile(n.rhs, code, kNoSlot);
          std::uint32_t d = out();
          code.push_back({Op::Eq, 1, d, a, b, 0, 0});
          return d;
        }
      },
      e.node());
}

void Simulator::execute(const std::vector<Instr>& code, std::uint64_t* v) noexcept {
  for (const Instr& i : code) {
    switch (i.op) {
      case Op::Copy: v[i.dst] = v[i.a]; break;
      case Op::Add: v[i.dst] = (v[i.a] + v[i.b]) & i.imm; break;
      case Op::Sub: v[i.dst] = (v[i.a] - v[i.b]) & i.imm; break;
      case Op::Mul: v[i.dst] = (v[i.a] * v[i.b]) & i.imm; break;
      case Op::And: v[i.dst] = v[i.a] & v[i.b]; break;
      case Op::Or: v[i.dst] = v[i.a] | v[i.b]; break;
      case Op::Xor: v[i.dst] = v[i.a] ^ v[i.b]; break;
      case Op::Shl: v[i.dst] = rtl::shift_left(v[i.a], v[i.b], i.width); break;
      case Op::Shr: v[i.dst] = rtl::shift_right(v[i.a], v[i.b], i.width); break;
      case Op::RotR: v[i.dst] = rtl::rotate_right(v[i.a], v[i.b], i.width); break;
      case Op::Not: v[i.dst] = ~v[i.a] & i.imm; break;
      case Op::Slice: v[i.dst] = (v[i.a] >> i.imm) & width_mask(i.width); break;
      case Op::ConcatStep: v[i.dst] = (v[i.a] << i.imm) | v[i.b]; break;
      case Op::Mux: v[i.dst] = v[i.a] == 1 ? v[i.b] : v[i.c]; break;
      case Op::Eq: v[i.dst] = v[i.a] == v[i.b] ? 1 : 0; break;
    }
  }
}

void Simulator::poke(rtl::SignalId id, std::uint64_t value) {
  if (id >= is_input_.size() || !is_input_[id]) {
    throw std::invalid_argument(fmt::format("signal id {} is not an input port", id));
  }
  values_[id] = value & width_mask(design_.signals[id].width);
}

void Simulator::settle() {
  execute(comb_code_, values_.data());
  observed_.assign(values_.begin(), values_.begin() + design_.signals.size());
}

void Simulator::step_clock() {
  if (reset_) {
    for (const auto& r : design_.registers) values_[r.target] = r.reset_value;
  } else {
    execute(next_code_, values_.data());
    for (auto [from, to] : commits_) values_[to] = values_[from];
  }
  ++cycle_;
}

void Simulator::cycle(std::span<const TestbenchProcess> processes, VcdTrace* trace) {
  ProcessContext ctx(*this);
  for (const auto& p : processes) {
    try {
      p(ctx);
    } catch (const SimFault&) {
      throw;
    } catch (const std::exception& e) {
      throw SimFault(cycle_, e.what());
    }
  }
  settle();
  if (trace) trace->sample(cycle_, observed_);
  step_clock();
}

SimState Simulator::state() const {
  SimState s;
  s.cycle = cycle_;
  s.values.assign(values_.begin(), values_.begin() + design_.signals.size());
  s.reset = reset_;
  return s;
}

RunResult run(const rtl::RtlDesign& design, std::uint64_t cycles,
              std::span<const TestbenchProcess> processes, VcdTrace* trace) {
  Simulator sim(design);
  for (std::uint64_t c = 0; c < cycles; ++c) sim.cycle(processes, trace);
  sim.settle();
  if (trace) trace->sample(sim.cycle_count(), sim.state().values);
  return {sim.state()};
}

}  // namespace pcgwb::sim
