#include "pcgwb/verilog.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <fmt/format.h>

namespace pcgwb::verilog {

using rtl::BinaryOp;
using rtl::Expr;
namespace node = rtl::node;

bool is_keyword(const std::string& word) {
  static const std::unordered_set<std::string> keywords = {
      "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1", "case",
      "casex", "casez", "cell", "cmos", "config", "deassign", "default", "defparam", "design",
      "disable", "edge", "else", "end", "endcase", "endconfig", "endfunction", "endgenerate",
      "endmodule", "endprimitive", "endspecify", "endtable", "endtask", "event", "for", "force",
      "forever", "fork", "function", "generate", "genvar", "highz0", "highz1", "if", "ifnone",
      "incdir", "include", "initial", "inout", "input", "instance", "integer", "join", "large",
      "liblist", "library", "localparam", "macromodule", "medium", "module", "nand", "negedge",
      "nmos", "nor", "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter",
      "pmos", "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup",
      "pulsestyle_onevent", "pulsestyle_ondetect", "rcmos", "real", "realtime", "reg",
      "release", "repeat", "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1", "scalared",
      "showcancelled", "signed", "small", "specify", "specparam", "strong0", "strong1",
      "supply0", "supply1", "table", "task", "time", "tran", "tranif0", "tranif1", "tri",
      "tri0", "tri1", "triand", "trior", "trireg", "unsigned", "use", "uwire", "vectored",
      "wait", "wand", "weak0", "weak1", "while", "wire", "wor", "xnor", "xor"};
  return keywords.count(word) != 0;
}

std::string legalize_name(const std::string& name) {
  std::string out;
  out.reserve(name.size() + 4);
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) || c == '_' || c == '$' ? c : '_');
  }
  if (out.empty()) out = "_";
  if (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '$') {
    out.insert(out.begin(), '_');
  }
  if (is_keyword(out)) out += "_sig";
  return out;
}

std::string NameTable::claim(const std::string& name) {
  const std::string base = legalize_name(name);
  std::string candidate = base;
  for (unsigned n = 1; used_.count(candidate) != 0; ++n) candidate = fmt::format("{}_{}", base, n);
  used_.insert(candidate);
  return candidate;
}

std::vector<PortInfo> module_ports(const rtl::RtlDesign& design, const std::string& clock,
                                   const std::string& reset) {
  NameTable names;
  std::vector<PortInfo> ports;
  ports.push_back({names.claim(clock), rtl::Direction::In, 1});
  ports.push_back({names.claim(reset), rtl::Direction::In, 1});
  std::vector<std::string> legal(design.signals.size());
  for (const auto& s : design.signals) legal[s.id] = names.claim(s.name);
  for (const auto& p : design.ports) {
    ports.push_back({legal[p.signal], p.direction, design.signals[p.signal].width});
  }
  return ports;
}

namespace {

std::string range(unsigned width) {
  return width == 1 ? std::string{} : fmt::format("[{}:0] ", width - 1);
}

std::string literal(std::uint64_t value, unsigned width) {
  return fmt::format("{}'h{:x}", width, value);
}

class Emitter {
 public:
  Emitter(const rtl::RtlDesign& d, const std::string& clock, const std::string& reset)
      : d_(d) {
    clock_ = names_.claim(clock);
    reset_ = names_.claim(reset);
    for (const auto& s : d_.signals) legal_.push_back(names_.claim(s.name));
  }

  std::string run() {
    std::vector<int> port_dir(d_.signals.size(), -1);
    for (const auto& p : d_.ports) port_dir[p.signal] = static_cast<int>(p.direction);
    std::vector<bool> is_reg(d_.signals.size(), false);
    for (const auto& r : d_.registers) is_reg[r.target] = true;

    // Render bodies first so hoisted temporaries are known before
    // declarations are written.
    std::vector<std::string> assigns;
    for (const auto& a : d_.comb_assigns) {
      assigns.push_back(fmt::format("  assign {} = {};\n", legal_[a.target], expr(a.expr)));
    }
    std::vector<std::string> reg_lines;
    for (const auto& r : d_.registers) {
      const auto& t = d_.signals[r.target];
      reg_lines.push_back(fmt::format("    if ({}) {} <= {}; else {} <= {};\n", reset_,
                                      legal_[r.target], literal(r.reset_value, t.width),
                                      legal_[r.target], expr(r.next)));
    }

    std::string out = fmt::format("module {}(\n", legalize_name(d_.name));
    std::vector<std::string> port_lines{
        fmt::format("  input wire {}", clock_),
        fmt::format("  input wire {}", reset_),
    };
    for (const auto& p : d_.ports) {
      const auto& s = d_.signals[p.signal];
      if (p.direction == rtl::Direction::In) {
        port_lines.push_back(fmt::format("  input wire {}{}", range(s.width), legal_[s.id]));
      } else {
        port_lines.push_back(fmt::format("  output {} {}{}", is_reg[s.id] ? "reg" : "wire",
                                         range(s.width), legal_[s.id]));
      }
    }
    for (std::size_t i = 0; i < port_lines.size(); ++i) {
      out += port_lines[i];
      out += i + 1 < port_lines.size() ? ",\n" : "\n";
    }
    out += ");\n";

    for (const auto& s : d_.signals) {
      if (port_dir[s.id] >= 0) continue;
      out += fmt::format("  {} {}{};\n", is_reg[s.id] ? "reg" : "wire", range(s.width),
                         legal_[s.id]);
    }
    for (const auto& t : temps_) out += fmt::format("  wire {}{};\n", range(t.width), t.name);
    for (const auto& t : temps_) out += fmt::format("  assign {} = {};\n", t.name, t.text);
    for (const auto& a : assigns) out += a;
    if (!reg_lines.empty()) {
      out += fmt::format("  always @(posedge {}) begin\n", clock_);
      for (const auto& l : reg_lines) out += l;
      out += "  end\n";
    }
    out += "endmodule\n";
    return out;
  }

 private:
  struct Temp {
    std::string name;
    unsigned width;
    std::string text;
  };

  // Shift amounts are taken modulo the operand width; only add the modulo
  // when the amount can actually reach the width.
  std::string amount(const Expr& amt, unsigned width) {
    if (const auto* c = amt.as<node::Const>()) return fmt::format("{}", c->value % width);
    const bool can_overflow = amt.width() >= 64 || (std::uint64_t{1} << amt.width()) > width;
    const std::string text = expr(amt);
    return can_overflow ? fmt::format("({} % {})", text, width) : text;
  }

  std::string expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, node::Const>) {
            return literal(n.value, n.width);
          } else if constexpr (std::is_same_v<T, node::Ref>) {
            return legal_.at(n.signal);
          } else if constexpr (std::is_same_v<T, node::Binary>) {
            const unsigned w = e.width();
            switch (n.op) {
              case BinaryOp::Shl:
                return fmt::format("({} << {})", expr(n.lhs), amount(n.rhs, w));
              case BinaryOp::ShrLogical:
                return fmt::format("({} >> {})", expr(n.lhs), amount(n.rhs, w));
              case BinaryOp::RotR: {
                const std::string x = expr(n.lhs);
                const std::string k = amount(n.rhs, w);
                if (k == "0") return x;
                return fmt::format("((({} >> {}) | ({} << ({} - {}))) & {})", x, k, x, w, k,
                                   literal(rtl::width_mask(w), w));
              }
              default:
                break;
            }
            const char* op = "+";
            switch (n.op) {
              case BinaryOp::Add: op = "+"; break;
              case BinaryOp::Sub: op = "-"; break;
              case BinaryOp::Mul: op = "*"; break;
              case BinaryOp::And: op = "&"; break;
              case BinaryOp::Or: op = "|"; break;
              case BinaryOp::Xor: op = "^"; break;
              default: break;
            }
            return fmt::format("({} {} {})", expr(n.lhs), op, expr(n.rhs));
          } else if constexpr (std::is_same_v<T, node::Not>) {
            return fmt::format("(~{})", expr(n.operand));
          } else if constexpr (std::is_same_v<T, node::Slice>) {
            return slice(n);
          } else if constexpr (std::is_same_v<T, node::Concat>) {
            std::string s = "{";
            for (std::size_t i = 0; i < n.parts.size(); ++i) {
              s += (i ? ", " : "") + expr(n.parts[i]);
            }
            return s + "}";
          } else if constexpr (std::is_same_v<T, node::Mux>) {
            return fmt::format("({} ? {} : {})", expr(n.select), expr(n.when_one),
                               expr(n.when_zero));
          } else {
            return fmt::format("({} == {})", expr(n.lhs), expr(n.rhs));
          }
        },
        e.node());
  }

  // Verilog only allows part-selects of named nets, so non-reference
  // operands are hoisted into a temporary wire.
  std::string slice(const node::Slice& n) {
    std::string base;
    unsigned width = n.operand.width();
    if (const auto* r = n.operand.as<node::Ref>()) {
      base = legal_.at(r->signal);
    } else if (const auto* c = n.operand.as<node::Const>()) {
      return literal((c->value >> n.low) & rtl::width_mask(n.length), n.length);
    } else {
      std::string text = expr(n.operand);
      base = names_.claim(fmt::format("slice_tmp{}", temps_.size()));
      temps_.push_back({base, width, std::move(text)});
    }
    if (n.low == 0 && n.length == width) return base;
    if (n.length == 1) return fmt::format("{}[{}]", base, n.low);
    return fmt::format("{}[{}:{}]", base, n.low + n.length - 1, n.low);
  }

  const rtl::RtlDesign& d_;
  NameTable names_;
  std::string clock_;
  std::string reset_;
  std::vector<std::string> legal_;
  std::vector<Temp> temps_;
};

}  // namespace

std::string emit_verilog(const rtl::RtlDesign& design, const std::string& clock,
                         const std::string& reset) {
  rtl::require_valid(design);
  return Emitter(design, clock, reset).run();
}

}  // namespace pcgwb::verilog
