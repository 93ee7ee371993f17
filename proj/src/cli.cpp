#include "pcgwb/cli.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pcgwb/battery/battery.hpp"
#include "pcgwb/pcg.hpp"
#include "pcgwb/sim.hpp"
#include "pcgwb/vcd.hpp"
#include "pcgwb/verilog.hpp"
#include "pcgwb/wishbone.hpp"

namespace pcgwb::cli {

std::optional<std::uint64_t> parse_u64(const std::string& text) {
  std::string_view digits = text;
  int base = 10;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    digits.remove_prefix(2);
    base = 16;
  }
  if (digits.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
  if (ec != std::errc{} || end != digits.data() + digits.size()) return std::nullopt;
  return value;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string seed = "0";
  std::string mult = fmt::format("0x{:016x}", pcg::kDefaultMultiplier);
  std::string inc = fmt::format("0x{:016x}", pcg::kDefaultIncrement);
  std::uint64_t count = 0;
  std::uint64_t cycles = 100;
  std::string source = "golden";
  std::string input = "-";
  std::string output;
  std::vector<std::string> tests;
  std::optional<std::size_t> tsamples;
  std::optional<std::size_t> psamples;
  std::string vcd;
  bool reproducible = false;
  bool tsv = false;
};

std::uint64_t number(const std::string& flag, const std::string& text) {
  const auto v = parse_u64(text);
  if (!v) throw UsageError(fmt::format("{}: expected a decimal or 0x-hex number, got '{}'", flag, text));
  return *v;
}

pcg::PcgConfig config_of(const Options& o) {
  return {number("--seed", o.seed), number("--mult", o.mult), number("--inc", o.inc)};
}

void warn_config(const pcg::PcgConfig& c, std::ostream& err) {
  for (auto w : pcg::validate_config(c)) err << "warning: " << pcg::to_string(w) << '\n';
}

// Writes to `out` for "-" or an empty path, otherwise to a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) : out_(&out) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void close() {
    out_->flush();
    if (!*out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

void write_words(std::ostream& os, std::span<const std::uint32_t> words) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(words.size() * 4);
  battery::append_words(words, bytes);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  const pcg::PcgConfig config = config_of(o);
  warn_config(config, err);
  Sink sink(o.output, out);
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<std::uint32_t> buffer;
  buffer.reserve(kChunk);

  if (o.source == "golden") {
    pcg::PcgGolden gen(config);
    for (std::uint64_t left = o.count; left > 0;) {
      const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(left, kChunk));
      buffer.resize(n);
      for (auto& w : buffer) w = gen.next();
      write_words(sink.stream(), buffer);
      left -= n;
    }
  } else {
    // Free-running peripheral: out of reset the state holds the seed and
    // ENABLE is set, so one output per clock with the bus idle.
    sim::Simulator sim(wb::build_rng_with_wishbone(config));
    const rtl::SignalId output = sim.design().signal("output").id;
    for (std::uint64_t left = o.count; left > 0;) {
      const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(left, kChunk));
      buffer.resize(n);
      for (auto& w : buffer) {
        sim.settle();
        w = static_cast<std::uint32_t>(sim.peek(output));
        sim.step_clock();
      }
      write_words(sink.stream(), buffer);
      left -= n;
    }
  }
  sink.close();
  return 0;
}

sim::VcdOptions vcd_options(const Options& o) {
  sim::VcdOptions opts;
  if (o.reproducible) opts.date = sim::kReproducibleDate;
  return opts;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.cycles < 1) throw UsageError("--cycles must be at least 1");
  const pcg::PcgConfig config = config_of(o);
  warn_config(config, err);

  // The testbench programs the generator over the bus and keeps sampling
  // until the cycle budget runs out.
  wb::WbHarness bus(config, true);
  const std::size_t samples = static_cast<std::size_t>(o.cycles / 4 + 1);
  for (const auto& t : wb::program_and_sample_script(config, samples)) bus.master().submit(t);
  for (std::uint64_t c = 0; c < o.cycles; ++c) {
    bus.tick();
    if (const auto& t = bus.master().timed_out()) throw wb::WbTimeout(t->first, t->second);
  }
  bus.finish();

  Sink sink(o.vcd, out);
  sim::write_vcd(*bus.trace(), sink.stream(), vcd_options(o));
  sink.close();

  std::ostream& summary = to_stdout(o.vcd) ? err : out;
  const auto& sim = bus.sim();
  summary << fmt::format(
      "simulated {} cycles: state=0x{:016x} output=0x{:08x} enable={} transactions={} acks={} "
      "violations={}\n",
      sim.cycle_count(), sim.peek("state"), sim.peek("output"), sim.peek("enable"),
      bus.master().completed().size(), bus.monitor().pulses(), bus.monitor().violations().size());
  for (const auto& v : bus.monitor().violations()) err << "ack violation: " << v << '\n';
  return bus.monitor().violations().empty() ? 0 : 2;
}

int cmd_emit_verilog(const Options& o, std::ostream& out, std::ostream& err) {
  const pcg::PcgConfig config = config_of(o);
  warn_config(config, err);
  const rtl::RtlDesign design = wb::build_rng_with_wishbone(config);
  const std::string text = verilog::emit_verilog(design, wb::kClock, wb::kReset);
  const std::string path = o.output.empty() ? "RNG.v" : o.output;
  Sink sink(path, out);
  sink.stream() << text;
  sink.close();

  std::ostream& roster = to_stdout(path) ? err : out;
  roster << "module " << design.name << " ports:\n";
  for (const auto& p : verilog::module_ports(design, wb::kClock, wb::kReset)) {
    roster << fmt::format("  {:<6} [{:>2}] {}\n", p.direction == rtl::Direction::In ? "input" : "output",
                          p.width, p.name);
  }
  return 0;
}

std::vector<battery::TestId> selected_tests(const Options& o) {
  if (o.tests.empty()) return battery::all_tests();
  std::vector<battery::TestId> ids;
  for (const auto& name : o.tests) {
    const auto id = battery::parse_test_id(name);
    if (!id) throw UsageError(fmt::format("--tests: unknown test '{}'", name));
    ids.push_back(*id);
  }
  return ids;
}

int cmd_battery(const Options& o, std::ostream& out, std::ostream& err, std::istream& in) {
  const auto tests = selected_tests(o);
  battery::BatterySizes sizes;
  if (o.tsamples) sizes.bit_tsamples = *o.tsamples;
  if (o.psamples) sizes.psamples = *o.psamples;
  if (sizes.psamples == 0) throw UsageError("--psamples must be at least 1");
  if (sizes.bit_tsamples == 0) throw UsageError("--tsamples must be at least 1");

  std::ifstream file;
  std::istream* source_stream = &in;
  if (o.input != "-") {
    file.open(o.input, std::ios::binary);
    if (!file) throw std::runtime_error(fmt::format("cannot open input '{}'", o.input));
    source_stream = &file;
  }
  battery::IstreamWordSource source(*source_stream);
  const battery::BatteryRun run = battery::run_battery(source, tests, sizes);
  for (const auto& n : run.notices) err << "notice: " << n << '\n';
  out << (o.tsv ? battery::format_tsv(run.results) : battery::format_report(run.results));
  if (run.results.empty()) {
    err << "error: no test ran\n";
    return 2;
  }
  return run.any_failed() ? 1 : 0;
}

int cmd_wb_demo(const Options& o, std::ostream& out, std::ostream& err) {
  const pcg::PcgConfig config = config_of(o);
  warn_config(config, err);
  constexpr std::size_t kSamples = 8;

  // Reset values are the reference defaults, so everything the demo shows
  // comes from the bus writes.
  std::vector<wb::Transaction> script = wb::program_and_sample_script(config, 0);
  const std::size_t program_len = script.size();
  for (std::uint32_t off : wb::kDataRegisters) script.push_back(wb::Transaction::read(off));
  script.push_back(wb::Transaction::read(wb::reg::kCtrl));
  const auto sampling = wb::program_and_sample_script(config, kSamples);
  script.insert(script.end(), sampling.begin() + static_cast<std::ptrdiff_t>(program_len),
                sampling.end());

  wb::WbHarness bus(pcg::PcgConfig{}, !o.vcd.empty());
  for (const auto& t : script) bus.master().submit(t);
  bus.drain();
  bus.finish();
  const wb::Transcript transcript(bus.master().completed().begin(), bus.master().completed().end());

  std::vector<std::uint32_t> sampled;
  for (const auto& e : transcript) {
    if (e.kind == wb::Transaction::Kind::Read && e.offset == wb::reg::kOutput) sampled.push_back(e.value);
  }
  const bool match = sampled == pcg::golden_stream(config, kSamples);

  std::ostream& text = o.vcd == "-" ? err : out;
  text << wb::format_transcript(transcript);
  text << fmt::format("{} cycles, {} acks, outputs {} golden model\n", bus.sim().cycle_count(),
                      bus.monitor().pulses(), match ? "match" : "DIFFER from");
  if (!o.vcd.empty()) {
    Sink sink(o.vcd, out);
    sim::write_vcd(*bus.trace(), sink.stream(), vcd_options(o));
    sink.close();
  }
  return match && bus.monitor().violations().empty() ? 0 : 2;
}

void add_config_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "initial state (decimal or 0x hex)")->capture_default_str();
  cmd->add_option("--mult", o.mult, "LCG multiplier")->capture_default_str();
  cmd->add_option("--inc", o.inc, "LCG increment")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            std::istream& in) {
  CLI::App app{"PCG32 RTL generator with Wishbone interface, simulator and test battery", "pcgwb"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "write 32-bit words, big-endian, to stdout or --out");
  add_config_flags(gen, o);
  gen->add_option("--count", o.count, "number of words")->required();
  gen->add_option("--source", o.source, "golden or rtl")
      ->check(CLI::IsMember({"golden", "rtl"}))
      ->capture_default_str();
  gen->add_option("--out", o.output, "output file, - for stdout");

  auto* simulate = app.add_subcommand("simulate", "program-and-sample testbench with VCD");
  add_config_flags(simulate, o);
  simulate->add_option("--cycles", o.cycles, "cycles to simulate (>= 1)")->capture_default_str();
  simulate->add_option("--vcd", o.vcd, "VCD path, - for stdout")->default_val("sim.vcd");
  simulate->add_flag("--reproducible", o.reproducible, "fixed VCD date");

  auto* emit = app.add_subcommand("emit-verilog", "write the RNG module");
  add_config_flags(emit, o);
  emit->add_option("--out", o.output, "output file, - for stdout (default RNG.v)");

  auto* bat = app.add_subcommand("battery", "run the randomness battery on a raw word stream");
  bat->add_option("--input", o.input, "raw big-endian words, - for stdin")->capture_default_str();
  bat->add_option("--tests", o.tests, "monobit, runs, serial, birthdays, rank32")->delimiter(',');
  bat->add_option("--tsamples", o.tsamples, "bits per sample for the bit-level tests");
  bat->add_option("--psamples", o.psamples, "samples per test");
  bat->add_flag("--tsv", o.tsv, "tab-separated output");

  auto* demo = app.add_subcommand("wb-demo", "scripted Wishbone session with transcript");
  add_config_flags(demo, o);
  demo->add_option("--vcd", o.vcd, "also write the waveform");
  demo->add_flag("--reproducible", o.reproducible, "fixed VCD date");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (emit->parsed()) return cmd_emit_verilog(o, out, err);
    if (bat->parsed()) return cmd_battery(o, out, err, in);
    if (demo->parsed()) return cmd_wb_demo(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace pcgwb::cli
