#pragma once

// Dieharder-style battery: repeated samples per test combined by a KS test,
// PASSED/WEAK/FAILED assessment, and the dieharder report table.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcgwb/battery/stream.hpp"
#include "pcgwb/battery/tests.hpp"

namespace pcgwb::battery {

enum class Assessment { Passed, Weak, Failed };

const char* to_string(Assessment a) noexcept;

/// Dieharder's defaults. Both tails are suspicious.
struct AssessmentPolicy {
  double weak = 0.005;
  double fail = 1e-6;
};

Assessment assess(double pvalue, const AssessmentPolicy& policy = {});

struct TestResult {
  std::string test_name;
  unsigned ntup = 0;
  std::size_t tsamples = 0;
  std::size_t psamples = 0;
  double pvalue = 0.0;
  Assessment assessment = Assessment::Failed;
};

enum class TestId { Birthdays, Rank32, Monobit, Runs, Serial };

const char* test_name(TestId id) noexcept;
std::optional<TestId> parse_test_id(const std::string& name);
/// All tests, in the order the battery runs them.
const std::vector<TestId>& all_tests();

struct BatterySizes {
  std::size_t bit_tsamples = 100000;  // bits per sample for monobit/runs/serial
  std::size_t psamples = 20;
  std::size_t birthday_tsamples = 100;  // experiments per sample
  std::size_t rank_tsamples = 10000;    // matrices per sample
  std::vector<unsigned> serial_m = {2, 4, 8};
};

/// Serial reference loops or OpenMP fan-out over samples. Both produce
/// identical results.
enum class Exec { Serial, Parallel };

struct BatteryRun {
  std::vector<TestResult> results;
  std::vector<std::string> notices;  // skipped tests, short input, warnings

  bool any_failed() const noexcept;
};

/// Runs each selected test on its own consecutive slice of the source.
/// A test whose slice cannot be filled is skipped with a notice.
BatteryRun run_battery(WordSource& source, const std::vector<TestId>& tests,
                       const BatterySizes& sizes = {}, Exec exec = Exec::Parallel,
                       const AssessmentPolicy& policy = {});

/// Per-sample p-values of one test over a buffered slice, before combining.
/// One column per reported row (sts_serial has two per tuple size), each
/// holding psamples values.
std::vector<std::vector<double>> sample_pvalues(TestId test, std::span<const std::uint32_t> slice,
                                   const BatterySizes& sizes, Exec exec);

/// Words each sample of `test` consumes.
std::size_t words_per_sample(TestId test, const BatterySizes& sizes);

/// The dieharder table header, separator lines included.
std::string report_header();
std::string format_row(const TestResult& r);
std::string format_report(const std::vector<TestResult>& results);
/// One tab-separated line per result, no header.
std::string format_tsv(const std::vector<TestResult>& results);

}  // namespace pcgwb::battery
