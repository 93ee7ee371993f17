#include "pcgwb/rtl.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include <fmt/format.h>

namespace pcgwb::rtl {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::BadWidth: return "BadWidth";
    case ErrorKind::WidthMismatch: return "WidthMismatch";
    case ErrorKind::MultipleDrivers: return "MultipleDrivers";
    case ErrorKind::BadResetValue: return "BadResetValue";
    case ErrorKind::UnknownSignal: return "UnknownSignal";
    case ErrorKind::UnboundSignal: return "UnboundSignal";
    case ErrorKind::BadSlice: return "BadSlice";
    case ErrorKind::BadConst: return "BadConst";
    case ErrorKind::InvalidDesign: return "InvalidDesign";
  }
  return "?";
}

const char* to_string(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::Add: return "Add";
    case BinaryOp::Sub: return "Sub";
    case BinaryOp::Mul: return "Mul";
    case BinaryOp::And: return "And";
    case BinaryOp::Or: return "Or";
    case BinaryOp::Xor: return "Xor";
    case BinaryOp::Shl: return "Shl";
    case BinaryOp::ShrLogical: return "ShrLogical";
    case BinaryOp::RotR: return "RotR";
  }
  return "?";
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::BadWidth: return "BadWidth";
    case ViolationKind::UnknownSignal: return "UnknownSignal";
    case ViolationKind::Undriven: return "Undriven";
    case ViolationKind::MultipleDrivers: return "MultipleDrivers";
    case ViolationKind::WidthMismatch: return "WidthMismatch";
    case ViolationKind::BadResetValue: return "BadResetValue";
    case ViolationKind::CombinationalLoop: return "CombinationalLoop";
  }
  return "?";
}

namespace {

void check_width(unsigned width) {
  if (width < 1 || width > kMaxWidth) {
    throw RtlError(ErrorKind::BadWidth, fmt::format("width {} outside 1..{}", width, kMaxWidth));
  }
}

void require_same_width(const Expr& a, const Expr& b, const char* what) {
  if (a.width() != b.width()) {
    throw RtlError(ErrorKind::WidthMismatch,
                   fmt::format("{}: operand widths {} and {} differ", what, a.width(), b.width()));
  }
}

}  // namespace

Expr Expr::constant(std::uint64_t value, unsigned width) {
  check_width(width);
  if (value > width_mask(width)) {
    throw RtlError(ErrorKind::BadConst,
                   fmt::format("constant {:#x} does not fit in {} bits", value, width));
  }
  return Expr(std::make_shared<const Node>(node::Const{value, width}), width);
}

Expr Expr::ref(const Signal& signal) {
  check_width(signal.width);
  return Expr(std::make_shared<const Node>(node::Ref{signal.id, signal.width}), signal.width);
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  switch (op) {
    case BinaryOp::Shl:
    case BinaryOp::ShrLogical:
    case BinaryOp::RotR:
      break;
    default:
      require_same_width(lhs, rhs, to_string(op));
  }
  const unsigned w = lhs.width();
  return Expr(std::make_shared<const Node>(node::Binary{op, std::move(lhs), std::move(rhs)}), w);
}

Expr Expr::bit_not(Expr operand) {
  const unsigned w = operand.width();
  return Expr(std::make_shared<const Node>(node::Not{std::move(operand)}), w);
}

Expr Expr::slice(Expr operand, unsigned low, unsigned length) {
  if (length == 0 || low + length > operand.width()) {
    throw RtlError(ErrorKind::BadSlice,
                   fmt::format("slice [{}+:{}] out of bounds for width {}", low, length,
                               operand.width()));
  }
  return Expr(std::make_shared<const Node>(node::Slice{std::move(operand), low, length}), length);
}

Expr Expr::concat(std::vector<Expr> parts) {
  unsigned total = 0;
  for (const auto& p : parts) total += p.width();
  if (parts.empty()) throw RtlError(ErrorKind::BadWidth, "empty concatenation");
  check_width(total);
  return Expr(std::make_shared<const Node>(node::Concat{std::move(parts)}), total);
}

Expr Expr::mux(Expr select, Expr when_one, Expr when_zero) {
  if (select.width() != 1) {
    throw RtlError(ErrorKind::WidthMismatch,
                   fmt::format("mux select must be 1 bit, got {}", select.width()));
  }
  require_same_width(when_one, when_zero, "Mux");
  const unsigned w = when_one.width();
  return Expr(std::make_shared<const Node>(
                  node::Mux{std::move(select), std::move(when_one), std::move(when_zero)}),
              w);
}

Expr Expr::eq(Expr lhs, Expr rhs) {
  require_same_width(lhs, rhs, "Eq");
  return Expr(std::make_shared<const Node>(node::Eq{std::move(lhs), std::move(rhs)}), 1);
}

void collect_refs(const Expr& expr, std::vector<SignalId>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Ref>) {
          out.push_back(n.signal);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          collect_refs(n.lhs, out);
          collect_refs(n.rhs, out);
        } else if constexpr (std::is_same_v<T, node::Not>) {
          collect_refs(n.operand, out);
        } else if constexpr (std::is_same_v<T, node::Slice>) {
          collect_refs(n.operand, out);
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          for (const auto& p : n.parts) collect_refs(p, out);
        } else if constexpr (std::is_same_v<T, node::Mux>) {
          collect_refs(n.select, out);
          collect_refs(n.when_one, out);
          collect_refs(n.when_zero, out);
        } else if constexpr (std::is_same_v<T, node::Eq>) {
          collect_refs(n.lhs, out);
          collect_refs(n.rhs, out);
        }
      },
      expr.node());
}

// ---------------------------------------------------------------------------
// Design construction

const Signal& RtlDesign::signal(SignalId id) const {
  if (id >= signals.size()) {
    throw RtlError(ErrorKind::UnknownSignal, fmt::format("no signal with id {}", id));
  }
  return signals[id];
}

std::optional<SignalId> RtlDesign::find(const std::string& signal_name) const {
  for (const auto& s : signals) {
    if (s.name == signal_name) return s.id;
  }
  return std::nullopt;
}

const Signal& RtlDesign::signal(const std::string& signal_name) const {
  auto id = find(signal_name);
  if (!id) throw RtlError(ErrorKind::UnknownSignal, "no signal named '" + signal_name + "'");
  return signals[*id];
}

namespace {

void require_member(const RtlDesign& design, const Signal& s) {
  if (s.id >= design.signals.size() || design.signals[s.id].name != s.name) {
    throw RtlError(ErrorKind::UnknownSignal,
                   fmt::format("signal '{}' does not belong to design '{}'", s.name, design.name));
  }
}

bool is_driven(const RtlDesign& design, SignalId id) {
  for (const auto& p : design.ports) {
    if (p.signal == id && p.direction == Direction::In) return true;
  }
  for (const auto& a : design.comb_assigns) {
    if (a.target == id) return true;
  }
  for (const auto& r : design.registers) {
    if (r.target == id) return true;
  }
  return false;
}

}  // namespace

Signal add_signal(RtlDesign& design, const std::string& name, unsigned width) {
  if (name.empty()) throw RtlError(ErrorKind::DuplicateName, "signal name must be nonempty");
  check_width(width);
  if (design.find(name)) {
    throw RtlError(ErrorKind::DuplicateName, "signal '" + name + "' already exists");
  }
  Signal s{static_cast<SignalId>(design.signals.size()), name, width};
  design.signals.push_back(s);
  return s;
}

Signal add_input(RtlDesign& design, const std::string& name, unsigned width) {
  Signal s = add_signal(design, name, width);
  design.ports.push_back({s.id, Direction::In});
  return s;
}

Signal add_output(RtlDesign& design, const std::string& name, unsigned width) {
  Signal s = add_signal(design, name, width);
  design.ports.push_back({s.id, Direction::Out});
  return s;
}

void assign_comb(RtlDesign& design, const Signal& target, Expr expr) {
  require_member(design, target);
  if (is_driven(design, target.id)) {
    throw RtlError(ErrorKind::MultipleDrivers, "signal '" + target.name + "' is already driven");
  }
  if (expr.width() != target.width) {
    throw RtlError(ErrorKind::WidthMismatch,
                   fmt::format("assign to '{}' ({} bits) from {}-bit expression", target.name,
                               target.width, expr.width()));
  }
  design.comb_assigns.push_back({target.id, std::move(expr)});
}

void add_register(RtlDesign& design, const Signal& target, Expr next,
                  std::uint64_t reset_value) {
  require_member(design, target);
  if (is_driven(design, target.id)) {
    throw RtlError(ErrorKind::MultipleDrivers, "signal '" + target.name + "' is already driven");
  }
  if (next.width() != target.width) {
    throw RtlError(ErrorKind::WidthMismatch,
                   fmt::format("register '{}' ({} bits) with {}-bit next value", target.name,
                               target.width, next.width()));
  }
  if (reset_value > width_mask(target.width)) {
    throw RtlError(ErrorKind::BadResetValue,
                   fmt::format("reset value {:#x} does not fit register '{}' ({} bits)",
                               reset_value, target.name, target.width));
  }
  design.registers.push_back({target.id, std::move(next), reset_value});
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(ViolationKind kind) const noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << rtl::to_string(v.kind);
    if (!v.signals.empty()) {
      os << '{';
      for (std::size_t i = 0; i < v.signals.size(); ++i) os << (i ? ", " : "") << v.signals[i];
      os << '}';
    }
    if (!v.detail.empty()) os << ": " << v.detail;
    os << '\n';
  }
  return os.str();
}

namespace {

class Checker {
 public:
  explicit Checker(const RtlDesign& d) : d_(d) {}

  ValidationReport run() {
    check_signals();
    check_drivers();
    for (const auto& a : d_.comb_assigns) check_driver_expr(a.target, a.expr, "assign");
    for (const auto& r : d_.registers) {
      check_driver_expr(r.target, r.next, "register");
      if (known(r.target) && r.reset_value > width_mask(d_.signals[r.target].width)) {
        add(ViolationKind::BadResetValue, {d_.signals[r.target].name},
            fmt::format("reset value {:#x}", r.reset_value));
      }
    }
    check_loops();
    return std::move(report_);
  }

 private:
  bool known(SignalId id) const { return id < d_.signals.size(); }

  void add(ViolationKind kind, std::vector<std::string> names, std::string detail = {}) {
    report_.violations.push_back({kind, std::move(names), std::move(detail)});
  }

  void check_signals() {
    std::unordered_map<std::string, SignalId> seen;
    for (std::size_t i = 0; i < d_.signals.size(); ++i) {
      const auto& s = d_.signals[i];
      if (s.id != i) add(ViolationKind::UnknownSignal, {s.name}, "signal id does not match slot");
      if (s.width < 1 || s.width > kMaxWidth) {
        add(ViolationKind::BadWidth, {s.name}, fmt::format("width {}", s.width));
      }
      if (!seen.emplace(s.name, s.id).second) add(ViolationKind::DuplicateName, {s.name});
    }
  }

  void check_drivers() {
    std::vector<unsigned> drivers(d_.signals.size(), 0);
    auto count = [&](SignalId id, const char* what) {
      if (!known(id)) {
        add(ViolationKind::UnknownSignal, {}, fmt::format("{} targets unknown id {}", what, id));
        return;
      }
      ++drivers[id];
    };
    for (const auto& p : d_.ports) {
      if (!known(p.signal)) {
        add(ViolationKind::UnknownSignal, {}, fmt::format("port references unknown id {}", p.signal));
      } else if (p.direction == Direction::In) {
        ++drivers[p.signal];
      }
    }
    for (const auto& a : d_.comb_assigns) count(a.target, "assign");
    for (const auto& r : d_.registers) count(r.target, "register");
    for (std::size_t i = 0; i < drivers.size(); ++i) {
      if (drivers[i] == 0) add(ViolationKind::Undriven, {d_.signals[i].name});
      if (drivers[i] > 1) {
        add(ViolationKind::MultipleDrivers, {d_.signals[i].name},
            fmt::format("{} drivers", drivers[i]));
      }
    }
  }

  // Ref widths are re-derived from the roster so hand-assembled designs are
  // caught too.
  void check_expr_refs(const Expr& e, const std::string& owner) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, node::Ref>) {
            if (!known(n.signal)) {
              add(ViolationKind::UnknownSignal, {owner}, fmt::format("reference to id {}", n.signal));
            } else if (d_.signals[n.signal].width != n.width) {
              add(ViolationKind::WidthMismatch, {owner, d_.signals[n.signal].name},
                  "reference width differs from signal width");
            }
          } else if constexpr (std::is_same_v<T, node::Binary>) {
            check_expr_refs(n.lhs, owner);
            check_expr_refs(n.rhs, owner);
          } else if constexpr (std::is_same_v<T, node::Not> || std::is_same_v<T, node::Slice>) {
            check_expr_refs(n.operand, owner);
          } else if constexpr (std::is_same_v<T, node::Concat>) {
            for (const auto& p : n.parts) check_expr_refs(p, owner);
          } else if constexpr (std::is_same_v<T, node::Mux>) {
            check_expr_refs(n.select, owner);
            check_expr_refs(n.when_one, owner);
            check_expr_refs(n.when_zero, owner);
          } else if constexpr (std::is_same_v<T, node::Eq>) {
            check_expr_refs(n.lhs, owner);
            check_expr_refs(n.rhs, owner);
          }
        },
        e.node());
  }

  void check_driver_expr(SignalId target, const Expr& e, const char* what) {
    if (!known(target)) return;
    const auto& t = d_.signals[target];
    if (e.width() != t.width) {
      add(ViolationKind::WidthMismatch, {t.name},
          fmt::format("{} of {} bits from {}-bit expression", what, t.width, e.width()));
    }
    check_expr_refs(e, t.name);
  }

  void check_loops() {
    // Dependency edges between comb-driven signals only; registers and
    // inputs break every path.
    const std::size_t n = d_.signals.size();
    std::vector<int> assign_of(n, -1);
    for (std::size_t i = 0; i < d_.comb_assigns.size(); ++i) {
      const auto t = d_.comb_assigns[i].target;
      if (known(t) && assign_of[t] < 0) assign_of[t] = static_cast<int>(i);
    }
    std::vector<std::vector<SignalId>> deps(n);
    for (std::size_t id = 0; id < n; ++id) {
      if (assign_of[id] < 0) continue;
      std::vector<SignalId> refs;
      collect_refs(d_.comb_assigns[assign_of[id]].expr, refs);
      for (auto r : refs) {
        if (known(r) && assign_of[r] >= 0) deps[id].push_back(r);
      }
      std::sort(deps[id].begin(), deps[id].end());
      deps[id].erase(std::unique(deps[id].begin(), deps[id].end()), deps[id].end());
    }

    // Tarjan SCC, iterative.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<SignalId> stack;
    std::vector<std::vector<SignalId>> components;
    int counter = 0;
    for (SignalId root = 0; root < n; ++root) {
      if (index[root] >= 0) continue;
      std::vector<std::pair<SignalId, std::size_t>> work{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!work.empty()) {
        auto& [v, next] = work.back();
        if (next < deps[v].size()) {
          SignalId w = deps[v][next++];
          if (index[w] < 0) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            work.emplace_back(w, 0);
          } else if (on_stack[w]) {
            low[v] = std::min(low[v], index[w]);
          }
          continue;
        }
        const SignalId done = v;
        work.pop_back();
        if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        if (low[done] == index[done]) {
          std::vector<SignalId> comp;
          SignalId w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != done);
          components.push_back(std::move(comp));
        }
      }
    }

    std::vector<std::vector<SignalId>> loops;
    for (auto& comp : components) {
      const bool self_loop =
          comp.size() == 1 &&
          std::binary_search(deps[comp[0]].begin(), deps[comp[0]].end(), comp[0]);
      if (comp.size() > 1 || self_loop) loops.push_back(cycle_through(comp, deps));
    }
    std::sort(loops.begin(), loops.end());
    for (const auto& loop : loops) {
      std::vector<std::string> names;
      for (auto id : loop) names.push_back(d_.signals[id].name);
      add(ViolationKind::CombinationalLoop, std::move(names));
    }
  }

  // One concrete cycle inside a strongly connected component, starting from
  // its lowest id and following dependency edges.
  static std::vector<SignalId> cycle_through(std::vector<SignalId> comp,
                                             const std::vector<std::vector<SignalId>>& deps) {
    std::sort(comp.begin(), comp.end());
    const SignalId start = comp.front();
    if (comp.size() == 1) return comp;
    std::unordered_map<SignalId, SignalId> parent;
    std::deque<SignalId> queue{start};
    parent[start] = start;
    while (!queue.empty()) {
      SignalId v = queue.front();
      queue.pop_front();
      for (auto w : deps[v]) {
        if (!std::binary_search(comp.begin(), comp.end(), w)) continue;
        if (w == start) {
          std::vector<SignalId> path;
          for (SignalId x = v; x != start; x = parent[x]) path.push_back(x);
          path.push_back(start);
          std::reverse(path.begin(), path.end());
          return path;
        }
        if (parent.emplace(w, v).second) queue.push_back(w);
      }
    }
    return comp;
  }

  const RtlDesign& d_;
  ValidationReport report_;
};

}  // namespace

ValidationReport check_design(const RtlDesign& design) { return Checker(design).run(); }

void require_valid(const RtlDesign& design) {
  auto report = check_design(design);
  if (!report.ok()) {
    throw RtlError(ErrorKind::InvalidDesign,
                   "design '" + design.name + "' failed validation:\n" + report.to_string());
  }
}

std::vector<std::size_t> comb_schedule(const RtlDesign& design) {
  const std::size_t n = design.signals.size();
  std::vector<int> assign_of(n, -1);
  for (std::size_t i = 0; i < design.comb_assigns.size(); ++i) {
    assign_of[design.comb_assigns[i].target] = static_cast<int>(i);
  }
  // Depth-first post-order in declaration order keeps the schedule stable.
  std::vector<std::size_t> order;
  std::vector<std::uint8_t> mark(design.comb_assigns.size(), 0);  // 0 new, 1 open, 2 done
  for (std::size_t root = 0; root < design.comb_assigns.size(); ++root) {
    if (mark[root]) continue;
    std::vector<std::pair<std::size_t, std::vector<SignalId>>> work;
    auto open = [&](std::size_t idx) {
      std::vector<SignalId> refs;
      collect_refs(design.comb_assigns[idx].expr, refs);
      std::reverse(refs.begin(), refs.end());
      mark[idx] = 1;
      work.emplace_back(idx, std::move(refs));
    };
    open(root);
    while (!work.empty()) {
      auto& [idx, pending] = work.back();
      if (pending.empty()) {
        mark[idx] = 2;
        order.push_back(idx);
        work.pop_back();
        continue;
      }
      SignalId dep = pending.back();
      pending.pop_back();
      int a = dep < n ? assign_of[dep] : -1;
      if (a < 0 || mark[a] == 2) continue;
      if (mark[a] == 1) {
        throw RtlError(ErrorKind::InvalidDesign, "combinational loop through '" +
                                                     design.signals[dep].name + "'");
      }
      open(static_cast<std::size_t>(a));
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// Reference evaluation

namespace {

std::uint64_t eval(const Expr& e, const Lookup& env) {
  return std::visit(
      [&](const auto& n) -> std::uint64_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Const>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, node::Ref>) {
          auto v = env(n.signal);
          if (!v) {
            throw RtlError(ErrorKind::UnboundSignal,
                           fmt::format("signal id {} has no value", n.signal));
          }
          return *v & width_mask(n.width);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          const unsigned w = e.width();
          const std::uint64_t a = eval(n.lhs, env);
          const std::uint64_t b = eval(n.rhs, env);
          switch (n.op) {
            case BinaryOp::Add: return (a + b) & width_mask(w);
            case BinaryOp::Sub: return (a - b) & width_mask(w);
            case BinaryOp::Mul: return (a * b) & width_mask(w);
            case BinaryOp::And: return a & b;
            case BinaryOp::Or: return a | b;
            case BinaryOp::Xor: return a ^ b;
            case BinaryOp::Shl: return shift_left(a, b, w);
            case BinaryOp::ShrLogical: return shift_right(a, b, w);
            case BinaryOp::RotR: return rotate_right(a, b, w);
          }
          return 0;
        } else if constexpr (std::is_same_v<T, node::Not>) {
          return ~eval(n.operand, env) & width_mask(e.width());
        } else if constexpr (std::is_same_v<T, node::Slice>) {
          return (eval(n.operand, env) >> n.low) & width_mask(n.length);
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          std::uint64_t acc = 0;
          for (const auto& p : n.parts) {
            // A 64-bit part is necessarily the only part.
            acc = p.width() >= 64 ? eval(p, env) : (acc << p.width()) | eval(p, env);
          }
          return acc;
        } else if constexpr (std::is_same_v<T, node::Mux>) {
          return eval(n.select, env) == 1 ? eval(n.when_one, env) : eval(n.when_zero, env);
        } else {
          return eval(n.lhs, env) == eval(n.rhs, env) ? 1 : 0;
        }
      },
      e.node());
}

}  // namespace

std::uint64_t eval_expr(const Expr& expr, const Lookup& env) { return eval(expr, env); }

std::uint64_t eval_expr(const Expr& expr,
                        const std::unordered_map<SignalId, std::uint64_t>& env) {
  return eval(expr, [&env](SignalId id) -> std::optional<std::uint64_t> {
    auto it = env.find(id);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
}

}  // namespace pcgwb::rtl
