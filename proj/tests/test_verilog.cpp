#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "pcgwb/verilog.hpp"
#include "pcgwb/wishbone.hpp"

using namespace pcgwb;
using namespace pcgwb::rtl;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RtlDesign counter_design() {
  RtlDesign d;
  d.name = "counter";
  const Signal en = add_input(d, "en", 1);
  const Signal c = add_output(d, "count", 3);
  add_register(d, c, mux(ref(en), ref(c) + lit(1, 3), ref(c)), 0);
  return d;
}

std::size_t count_declarations(const std::string& text, const std::string& ident) {
  const std::regex decl("(input|output|wire|reg)\\b[^;\\n]*\\b" + ident + "\\b\\s*[,;\\n]");
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.find("assign") != std::string::npos || line.find("<=") != std::string::npos) continue;
    if (std::regex_search(line + "\n", decl)) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("legalize_name") {
  CHECK(verilog::legalize_name("state") == "state");
  CHECK(verilog::legalize_name("module") == "module_sig");
  CHECK(verilog::legalize_name("output") == "output_sig");
  CHECK(verilog::legalize_name("2fast") == "_2fast");
  CHECK(verilog::legalize_name("a.b-c") == "a_b_c");
  const std::regex legal("[a-zA-Z_][a-zA-Z0-9_$]*");
  for (const char* raw : {"", "9", "wire", "x y", "$dollar", "ok$"}) {
    CHECK(std::regex_match(verilog::legalize_name(raw), legal));
  }
}

TEST_CASE("name table resolves collisions deterministically") {
  verilog::NameTable t;
  CHECK(t.claim("a") == "a");
  CHECK(t.claim("a") == "a_1");
  CHECK(t.claim("a") == "a_2");
  CHECK(t.claim("reg") == "reg_sig");
  CHECK(t.claim("reg_sig") == "reg_sig_1");
}

TEST_CASE("empty design") {
  RtlDesign d;
  d.name = "top";
  CHECK(verilog::emit_verilog(d) == "module top(\n  input wire clk,\n  input wire rst\n);\nendmodule\n");
}

TEST_CASE("invalid designs are rejected") {
  RtlDesign d;
  d.name = "bad";
  const Signal a = add_signal(d, "a", 4);
  const Signal b = add_signal(d, "b", 4);
  assign_comb(d, a, ref(b));
  assign_comb(d, b, ref(a));
  CHECK_THROWS_AS(verilog::emit_verilog(d), RtlError);
}

TEST_CASE("counter matches golden file") {
  const std::string text = verilog::emit_verilog(counter_design());
  CHECK(text == slurp(PCGWB_GOLDEN_DIR "/counter.v"));
}

TEST_CASE("RNG matches golden file and carries the Caravel ports") {
  const RtlDesign d = wb::build_rng_with_wishbone({});
  const std::string text = verilog::emit_verilog(d, wb::kClock, wb::kReset);
  CHECK(text == slurp(PCGWB_GOLDEN_DIR "/RNG.v"));
  CHECK(text.rfind("module RNG(", 0) == 0);

  const auto ports = verilog::module_ports(d, wb::kClock, wb::kReset);
  const auto& roster = wb::wb_port_set();
  REQUIRE(ports.size() == roster.size());
  for (std::size_t i = 0; i < roster.size(); ++i) {
    CHECK(ports[i].name == roster[i].name);
    CHECK(ports[i].direction == roster[i].direction);
    CHECK(ports[i].width == roster[i].width);
  }
}

TEST_CASE("every signal is declared exactly once") {
  const RtlDesign d = wb::build_rng_with_wishbone({});
  const std::string text = verilog::emit_verilog(d, wb::kClock, wb::kReset);
  verilog::NameTable names;
  names.claim(wb::kClock);
  names.claim(wb::kReset);
  for (const auto& s : d.signals) {
    const std::string ident = names.claim(s.name);
    CHECK_MESSAGE(count_declarations(text, ident) == 1, ident);
  }
  CHECK(count_declarations(text, "output") == 0);
}

TEST_CASE("emission is deterministic") {
  const auto d = wb::build_rng_with_wishbone({1, 3, 5});
  CHECK(verilog::emit_verilog(d, "c", "r") == verilog::emit_verilog(d, "c", "r"));
}

TEST_CASE("rotate lowering is masked to the operand width") {
  RtlDesign d;
  d.name = "rot";
  const Signal x = add_input(d, "x", 8);
  const Signal k = add_input(d, "k", 3);
  const Signal y = add_output(d, "y", 8);
  assign_comb(d, y, rotr(ref(x), ref(k)));
  const std::string text = verilog::emit_verilog(d);
  CHECK(text.find("(((x >> k) | (x << (8 - k))) & 8'hff)") != std::string::npos);
}
