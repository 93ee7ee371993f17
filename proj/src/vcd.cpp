#include "pcgwb/vcd.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace pcgwb::sim {

std::string vcd_identifier(std::size_t n) {
  std::string code;
  do {
    code.push_back(static_cast<char>('!' + n % 94));
    n /= 94;
  } while (n != 0);
  return code;
}

VcdTrace::VcdTrace(const rtl::RtlDesign& design) : scope_(design.name) {
  variables_.reserve(design.signals.size());
  for (std::size_t i = 0; i < design.signals.size(); ++i) {
    const auto& s = design.signals[i];
    std::string name = s.name;
    for (char& c : name) {
      if (c == ' ' || c == '\t') c = '_';
    }
    variables_.push_back({std::move(name), s.width, vcd_identifier(i)});
  }
}

void VcdTrace::sample(std::uint64_t time, std::span<const std::uint64_t> values) {
  if (values.size() < variables_.size()) {
    throw std::invalid_argument("VcdTrace::sample: fewer values than traced variables");
  }
  if (last_time_ && time <= *last_time_) {
    throw std::invalid_argument("VcdTrace::sample: time must increase");
  }
  last_time_ = time;
  if (!sampled_) {
    sampled_ = true;
    initial_.assign(values.begin(), values.begin() + variables_.size());
    last_ = initial_;
    start_time_ = time;
    return;
  }
  Step step{time, {}};
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (values[i] != last_[i]) {
      step.changes.push_back({i, values[i]});
      last_[i] = values[i];
    }
  }
  if (!step.changes.empty()) steps_.push_back(std::move(step));
}

namespace {

void put_value(std::ostream& out, const VcdTrace::Variable& var, std::uint64_t value) {
  if (var.width == 1) {
    out << (value & 1 ? '1' : '0') << var.code << '\n';
    return;
  }
  out << 'b';
  if (value == 0) {
    out << '0';
  } else {
    int top = 63;
    while (((value >> top) & 1) == 0) --top;
    for (int bit = top; bit >= 0; --bit) out << (((value >> bit) & 1) ? '1' : '0');
  }
  out << ' ' << var.code << '\n';
}

std::string local_time_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%d %H:%M:%S");
  return os.str();
}

}  // namespace

void write_vcd(const VcdTrace& trace, std::ostream& out, const VcdOptions& options) {
  out << "$date\n  " << (options.date.empty() ? local_time_now() : options.date) << "\n$end\n";
  out << "$version\n  " << options.version << "\n$end\n";
  out << "$timescale 1ns $end\n";
  out << "$scope module " << trace.scope() << " $end\n";
  for (const auto& v : trace.variables()) {
    out << "$var wire " << v.width << ' ' << v.code << ' ' << v.name << " $end\n";
  }
  out << "$upscope $end\n";
  out << "$enddefinitions $end\n";

  out << '#' << trace.start_time() << '\n';
  out << "$dumpvars\n";
  const auto& init = trace.initial();
  for (std::size_t i = 0; i < init.size(); ++i) put_value(out, trace.variables()[i], init[i]);
  out << "$end\n";

  for (const auto& step : trace.steps()) {
    out << '#' << step.time << '\n';
    for (const auto& c : step.changes) put_value(out, trace.variables()[c.variable], c.value);
  }
  out.flush();
  if (!out) throw VcdWriteError("failed writing VCD output");
}

std::string vcd_to_string(const VcdTrace& trace, const VcdOptions& options) {
  std::ostringstream os;
  write_vcd(trace, os, options);
  return os.str();
}

}  // namespace pcgwb::sim
