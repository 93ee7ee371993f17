#pragma once

// Value Change Dump recording and emission. One timestamp per clock cycle,
// timescale 1 ns.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcgwb/rtl.hpp"

namespace pcgwb::sim {

/// Identifier code for the n-th variable: printable ASCII '!'..'~', base 94.
std::string vcd_identifier(std::size_t n);

class VcdTrace {
 public:
  struct Variable {
    std::string name;
    unsigned width;
    std::string code;
  };
  struct Change {
    std::size_t variable;
    std::uint64_t value;
  };
  struct Step {
    std::uint64_t time;
    std::vector<Change> changes;
  };

  /// Traces every signal of the design, in declaration order.
  explicit VcdTrace(const rtl::RtlDesign& design);

  /// Record settled values (indexed by SignalId) at `time`. Times must be
  /// strictly increasing. Only differences from the previous sample are kept.
  void sample(std::uint64_t time, std::span<const std::uint64_t> values);

  const std::string& scope() const noexcept { return scope_; }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  /// Values at the first sample.
  const std::vector<std::uint64_t>& initial() const noexcept { return initial_; }
  std::uint64_t start_time() const noexcept { return start_time_; }
  const std::vector<Step>& steps() const noexcept { return steps_; }
  bool empty() const noexcept { return !sampled_; }

 private:
  std::string scope_;
  std::vector<Variable> variables_;
  std::vector<std::uint64_t> initial_;
  std::vector<std::uint64_t> last_;
  std::uint64_t start_time_ = 0;
  bool sampled_ = false;
  std::optional<std::uint64_t> last_time_;
  std::vector<Step> steps_;
};

struct VcdOptions {
  /// Text of the $date section. Empty means the current local time.
  std::string date;
  std::string version = "pcgwb rtl simulator";
};

/// Date used by reproducible runs.
inline constexpr const char* kReproducibleDate = "1970-01-01 00:00:00";

class VcdWriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_vcd(const VcdTrace& trace, std::ostream& out, const VcdOptions& options = {});
std::string vcd_to_string(const VcdTrace& trace, const VcdOptions& options = {});

}  // namespace pcgwb::sim
