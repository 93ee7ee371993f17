#pragma once

// Verilog-2001 emission for validated designs.

#include <set>
#include <string>
#include <vector>

#include "pcgwb/rtl.hpp"

namespace pcgwb::verilog {

bool is_keyword(const std::string& word);

/// Lexical legalization of a single name: invalid characters become '_',
/// a leading digit gets a '_' prefix, keywords get a "_sig" suffix.
std::string legalize_name(const std::string& name);

/// Hands out legal, unique identifiers. Collisions get "_1", "_2", ...
/// in request order.
class NameTable {
 public:
  std::string claim(const std::string& name);
  bool taken(const std::string& identifier) const { return used_.count(identifier) != 0; }

 private:
  std::set<std::string> used_;
};

struct PortInfo {
  std::string name;
  rtl::Direction direction;
  unsigned width;
};

/// Port list of the emitted module: clock and reset first, then the
/// design's ports in declaration order.
std::vector<PortInfo> module_ports(const rtl::RtlDesign& design, const std::string& clock,
                                   const std::string& reset);

/// Throws rtl::RtlError(InvalidDesign) for designs that fail check_design.
std::string emit_verilog(const rtl::RtlDesign& design, const std::string& clock = "clk",
                         const std::string& reset = "rst");

}  // namespace pcgwb::verilog
