#pragma once

// Minimal hardware-construction IR: width-checked signals, combinational
// expressions, clocked registers and whole-design validation.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace pcgwb::rtl {

inline constexpr unsigned kMaxWidth = 64;

using SignalId = std::uint32_t;

/// All-ones mask for a 1..64 bit value.
constexpr std::uint64_t width_mask(unsigned width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

enum class ErrorKind {
  DuplicateName,
  BadWidth,
  WidthMismatch,
  MultipleDrivers,
  BadResetValue,
  UnknownSignal,
  UnboundSignal,
  BadSlice,
  BadConst,
  InvalidDesign,
};

const char* to_string(ErrorKind kind) noexcept;

class RtlError : public std::runtime_error {
 public:
  RtlError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Signal {
  SignalId id = 0;
  std::string name;
  unsigned width = 0;
};

enum class BinaryOp { Add, Sub, Mul, And, Or, Xor, Shl, ShrLogical, RotR };

const char* to_string(BinaryOp op) noexcept;

class Expr;

namespace node {
struct Const {
  std::uint64_t value;
  unsigned width;
};
struct Ref {
  SignalId signal;
  unsigned width;
};
struct Binary;
struct Not;
struct Slice;
struct Concat;
struct Mux;
struct Eq;
}  // namespace node

/// Immutable expression tree handle. Nodes are shared, so copying is cheap.
/// Factories check widths eagerly and throw RtlError on violations.
class Expr {
 public:
  using Node = std::variant<node::Const, node::Ref, node::Binary, node::Not,
                            node::Slice, node::Concat, node::Mux, node::Eq>;

  unsigned width() const noexcept { return width_; }
  const Node& node() const noexcept;

  template <class T>
  const T* as() const noexcept;

  static Expr constant(std::uint64_t value, unsigned width);
  static Expr ref(const Signal& signal);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr bit_not(Expr operand);
  static Expr slice(Expr operand, unsigned low, unsigned length);
  static Expr concat(std::vector<Expr> parts_msb_first);
  static Expr mux(Expr select, Expr when_one, Expr when_zero);
  static Expr eq(Expr lhs, Expr rhs);

 private:
  Expr(std::shared_ptr<const Node> node, unsigned width)
      : node_(std::move(node)), width_(width) {}

  std::shared_ptr<const Node> node_;
  unsigned width_ = 0;
};

namespace node {
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Not {
  Expr operand;
};
struct Slice {
  Expr operand;
  unsigned low;
  unsigned length;
};
struct Concat {
  std::vector<Expr> parts;  // most significant first
};
struct Mux {
  Expr select;
  Expr when_one;
  Expr when_zero;
};
struct Eq {
  Expr lhs;
  Expr rhs;
};
}  // namespace node

inline const Expr::Node& Expr::node() const noexcept { return *node_; }

template <class T>
const T* Expr::as() const noexcept {
  return std::get_if<T>(node_.get());
}

// Builder shorthand.
inline Expr lit(std::uint64_t value, unsigned width) { return Expr::constant(value, width); }
inline Expr ref(const Signal& s) { return Expr::ref(s); }
inline Expr operator+(Expr a, Expr b) { return Expr::binary(BinaryOp::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(BinaryOp::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(BinaryOp::Mul, std::move(a), std::move(b)); }
inline Expr operator&(Expr a, Expr b) { return Expr::binary(BinaryOp::And, std::move(a), std::move(b)); }
inline Expr operator|(Expr a, Expr b) { return Expr::binary(BinaryOp::Or, std::move(a), std::move(b)); }
inline Expr operator^(Expr a, Expr b) { return Expr::binary(BinaryOp::Xor, std::move(a), std::move(b)); }
inline Expr operator~(Expr a) { return Expr::bit_not(std::move(a)); }
inline Expr shl(Expr a, Expr amount) { return Expr::binary(BinaryOp::Shl, std::move(a), std::move(amount)); }
inline Expr shr(Expr a, Expr amount) { return Expr::binary(BinaryOp::ShrLogical, std::move(a), std::move(amount)); }
inline Expr rotr(Expr a, Expr amount) { return Expr::binary(BinaryOp::RotR, std::move(a), std::move(amount)); }
inline Expr slice(Expr a, unsigned low, unsigned length) { return Expr::slice(std::move(a), low, length); }
inline Expr concat(std::vector<Expr> parts) { return Expr::concat(std::move(parts)); }
inline Expr mux(Expr sel, Expr one, Expr zero) { return Expr::mux(std::move(sel), std::move(one), std::move(zero)); }
inline Expr eq(Expr a, Expr b) { return Expr::eq(std::move(a), std::move(b)); }

/// Collect the ids of every signal referenced by `expr` (with repeats).
void collect_refs(const Expr& expr, std::vector<SignalId>& out);

enum class Direction { In, Out };

struct Port {
  SignalId signal;
  Direction direction;
};

struct CombAssign {
  SignalId target;
  Expr expr;
};

struct Register {
  SignalId target;
  Expr next;
  std::uint64_t reset_value = 0;
};

/// A netlist with a single implicit clock and a synchronous active-high
/// reset. Clock and reset are not signals of the design; the simulator and
/// the Verilog backend supply them.
///
/// The members are plain data so a design can be inspected freely. The
/// builder functions below enforce the construction-time rules; check_design
/// re-verifies everything, including designs assembled by hand.
struct RtlDesign {
  std::string name;
  std::vector<Signal> signals;  // indexed by SignalId
  std::vector<Port> ports;
  std::vector<CombAssign> comb_assigns;
  std::vector<Register> registers;

  const Signal& signal(SignalId id) const;
  std::optional<SignalId> find(const std::string& signal_name) const;
  const Signal& signal(const std::string& signal_name) const;
};

Signal add_signal(RtlDesign& design, const std::string& name, unsigned width);
Signal add_input(RtlDesign& design, const std::string& name, unsigned width);
/// Output ports are ordinary signals that still need a driver.
Signal add_output(RtlDesign& design, const std::string& name, unsigned width);
void assign_comb(RtlDesign& design, const Signal& target, Expr expr);
void add_register(RtlDesign& design, const Signal& target, Expr next,
                  std::uint64_t reset_value);

enum class ViolationKind {
  DuplicateName,
  BadWidth,
  UnknownSignal,
  Undriven,
  MultipleDrivers,
  WidthMismatch,
  BadResetValue,
  CombinationalLoop,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::vector<std::string> signals;  // the cycle, for CombinationalLoop
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const noexcept;
  std::string to_string() const;
};

ValidationReport check_design(const RtlDesign& design);

/// Throws RtlError(InvalidDesign) carrying the report text when not ok.
void require_valid(const RtlDesign& design);

/// Comb-assign indices in dependency order. Requires an acyclic design.
std::vector<std::size_t> comb_schedule(const RtlDesign& design);

using Lookup = std::function<std::optional<std::uint64_t>(SignalId)>;

/// Reference evaluator: the semantics the simulator and backend must agree
/// with. Arithmetic wraps to the node width; shift and rotate amounts are
/// taken modulo the operand width.
std::uint64_t eval_expr(const Expr& expr, const Lookup& env);
std::uint64_t eval_expr(const Expr& expr,
                        const std::unordered_map<SignalId, std::uint64_t>& env);

/// Scalar helpers shared by the evaluator and the compiled simulator.
constexpr std::uint64_t rotate_right(std::uint64_t x, std::uint64_t amount,
                                     unsigned width) noexcept {
  const unsigned k = static_cast<unsigned>(amount % width);
  if (k == 0) return x & width_mask(width);
  return ((x >> k) | (x << (width - k))) & width_mask(width);
}

constexpr std::uint64_t shift_left(std::uint64_t x, std::uint64_t amount,
                                   unsigned width) noexcept {
  return (x << (amount % width)) & width_mask(width);
}

constexpr std::uint64_t shift_right(std::uint64_t x, std::uint64_t amount,
                                    unsigned width) noexcept {
  return (x & width_mask(width)) >> (amount % width);
}

}  // namespace pcgwb::rtl
