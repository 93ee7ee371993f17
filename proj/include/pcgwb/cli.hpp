#pragma once

// The pcgwb command line: generate, simulate, emit-verilog, battery, wb-demo.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace pcgwb::cli {

/// Decimal or 0x-prefixed hexadecimal, full 64-bit range.
std::optional<std::uint64_t> parse_u64(const std::string& text);

/// Runs one invocation. Exit codes: 0 success, 1 battery reported a FAILED
/// row, 2 usage or runtime error (diagnostic on `err`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            std::istream& in);

}  // namespace pcgwb::cli
