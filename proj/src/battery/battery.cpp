#include "pcgwb/battery/battery.hpp"

#include <cmath>
#include <exception>

#include <fmt/format.h>

#include "pcgwb/battery/numerics.hpp"

namespace pcgwb::battery {

const char* to_string(Assessment a) noexcept {
  switch (a) {
    case Assessment::Passed: return "PASSED";
    case Assessment::Weak: return "WEAK";
    case Assessment::Failed: return "FAILED";
  }
  return "?";
}

Assessment assess(double p, const AssessmentPolicy& policy) {
  if (p < policy.fail || p > 1.0 - policy.fail) return Assessment::Failed;
  if (p < policy.weak || p > 1.0 - policy.weak) return Assessment::Weak;
  return Assessment::Passed;
}

const char* test_name(TestId id) noexcept {
  switch (id) {
    case TestId::Birthdays: return "diehard_birthdays";
    case TestId::Rank32: return "diehard_rank_32x32";
    case TestId::Monobit: return "sts_monobit";
    case TestId::Runs: return "sts_runs";
    case TestId::Serial: return "sts_serial";
  }
  return "?";
}

std::optional<TestId> parse_test_id(const std::string& name) {
  for (TestId id : all_tests()) {
    if (name == test_name(id)) return id;
  }
  if (name == "birthdays") return TestId::Birthdays;
  if (name == "rank32" || name == "rank") return TestId::Rank32;
  if (name == "monobit") return TestId::Monobit;
  if (name == "runs") return TestId::Runs;
  if (name == "serial") return TestId::Serial;
  return std::nullopt;
}

const std::vector<TestId>& all_tests() {
  static const std::vector<TestId> tests = {TestId::Birthdays, TestId::Rank32, TestId::Monobit,
                                            TestId::Runs, TestId::Serial};
  return tests;
}

bool BatteryRun::any_failed() const noexcept {
  for (const auto& r : results) {
    if (r.assessment == Assessment::Failed) return true;
  }
  return false;
}

std::size_t words_per_sample(TestId test, const BatterySizes& sizes) {
  switch (test) {
    case TestId::Birthdays: return sizes.birthday_tsamples * BirthdayParams{}.nms;
    case TestId::Rank32: return sizes.rank_tsamples * 32;
    case TestId::Monobit:
    case TestId::Runs:
    case TestId::Serial: return (sizes.bit_tsamples + 31) / 32;
  }
  return 0;
}

namespace {

using Columns = std::vector<std::vector<double>>;

template <class PerSample>
Columns fan_out(std::size_t psamples, std::size_t columns, Exec exec, PerSample per_sample) {
  Columns out(columns, std::vector<double>(psamples, 0.0));
  auto body = [&](std::size_t i) {
    const std::vector<double> ps = per_sample(i);
    for (std::size_t c = 0; c < columns; ++c) out[c][i] = ps[c];
  };
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < psamples; ++i) body(i);
    return out;
  }
  std::exception_ptr error;
  const auto n = static_cast<long long>(psamples);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(pcgwb_battery_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

BitSequence sample_bits(std::span<const std::uint32_t> words, std::size_t nbits) {
  return BitSequence(std::vector<std::uint32_t>(words.begin(), words.end()), nbits);
}

}  // namespace

std::vector<std::vector<double>> sample_pvalues(TestId test, std::span<const std::uint32_t> slice,
                                                const BatterySizes& sizes, Exec exec) {
  const std::size_t per = words_per_sample(test, sizes);
  const std::size_t psamples = sizes.psamples;
  if (slice.size() < per * psamples) {
    throw BatteryError(BatteryErrorKind::InsufficientData,
                       fmt::format("{}: need {} words, have {}", test_name(test), per * psamples,
                                   slice.size()));
  }
  auto chunk = [&](std::size_t i) { return slice.subspan(i * per, per); };

  switch (test) {
    case TestId::Birthdays: {
      BirthdayParams params;
      params.experiments = sizes.birthday_tsamples;
      return fan_out(psamples, 1, exec, [&](std::size_t i) {
        return std::vector<double>{birthday_spacings(chunk(i), params)};
      });
    }
    case TestId::Rank32:
      return fan_out(psamples, 1, exec, [&](std::size_t i) {
        return std::vector<double>{binary_rank_32(chunk(i), sizes.rank_tsamples)};
      });
    case TestId::Monobit:
      return fan_out(psamples, 1, exec, [&](std::size_t i) {
        return std::vector<double>{monobit(sample_bits(chunk(i), sizes.bit_tsamples))};
      });
    case TestId::Runs:
      return fan_out(psamples, 1, exec, [&](std::size_t i) {
        return std::vector<double>{runs_test(sample_bits(chunk(i), sizes.bit_tsamples))};
      });
    case TestId::Serial:
      return fan_out(psamples, 2 * sizes.serial_m.size(), exec, [&](std::size_t i) {
        const BitSequence bits = sample_bits(chunk(i), sizes.bit_tsamples);
        std::vector<double> ps;
        for (unsigned m : sizes.serial_m) {
          const SerialPValues s = serial_test(bits, m);
          ps.push_back(s.p1);
          ps.push_back(s.p2);
        }
        return ps;
      });
  }
  return {};
}

BatteryRun run_battery(WordSource& source, const std::vector<TestId>& tests,
                       const BatterySizes& sizes, Exec exec, const AssessmentPolicy& policy) {
  BatteryRun run;
  if (sizes.psamples == 0) throw BatteryError(BatteryErrorKind::BadParameter, "psamples must be >= 1");

  std::vector<std::uint32_t> buffer;
  for (TestId test : tests) {
    BatterySizes local = sizes;
    if (test == TestId::Serial) {
      local.serial_m.clear();
      for (unsigned m : sizes.serial_m) {
        if (m < 2 || std::ldexp(1.0, static_cast<int>(m)) > static_cast<double>(sizes.bit_tsamples) / 5.0) {
          run.notices.push_back(fmt::format("sts_serial: ntup {} skipped (TupleTooLarge for {} bits)",
                                            m, sizes.bit_tsamples));
        } else {
          local.serial_m.push_back(m);
        }
      }
      if (local.serial_m.empty()) continue;
    }
    if (test == TestId::Monobit && sizes.bit_tsamples < 100) {
      run.notices.push_back("sts_monobit: fewer than 100 bits per sample");
    }

    const std::size_t need = words_per_sample(test, local) * local.psamples;
    buffer.resize(need);
    const std::size_t got = source.read(buffer);
    if (got < need) {
      run.notices.push_back(fmt::format("{}: skipped, InsufficientData (needed {} words, got {})",
                                        test_name(test), need, got));
      continue;
    }

    const Columns columns = sample_pvalues(test, buffer, local, exec);
    auto combine = [&](const std::vector<double>& ps) {
      return ps.size() == 1 ? ps.front() : ks_uniform(ps);
    };
    auto push = [&](unsigned ntup, std::size_t tsamples, double p) {
      run.results.push_back({test_name(test), ntup, tsamples, local.psamples, p, assess(p, policy)});
    };
    switch (test) {
      case TestId::Birthdays: push(0, local.birthday_tsamples, combine(columns[0])); break;
      case TestId::Rank32: push(0, local.rank_tsamples, combine(columns[0])); break;
      case TestId::Monobit: push(1, local.bit_tsamples, combine(columns[0])); break;
      case TestId::Runs: push(2, local.bit_tsamples, combine(columns[0])); break;
      case TestId::Serial:
        for (std::size_t k = 0; k < local.serial_m.size(); ++k) {
          push(local.serial_m[k], local.bit_tsamples, combine(columns[2 * k]));
          push(local.serial_m[k], local.bit_tsamples, combine(columns[2 * k + 1]));
        }
        break;
    }
  }
  if (source.dropped_bytes() != 0) {
    run.notices.push_back(
        fmt::format("input ended mid-word; {} trailing byte(s) dropped", source.dropped_bytes()));
  }
  return run;
}

std::string report_header() {
  return "#=============================================================================#\n"
         "#            test_name   |ntup| tsamples |psamples|  p-value |Assessment\n"
         "#=============================================================================#\n";
}

std::string format_row(const TestResult& r) {
  return fmt::format("{:>25}|{:>4}|{:>10}|{:>8}|{:10.8f}|  {}\n", r.test_name, r.ntup,
                     r.tsamples, r.psamples, r.pvalue, to_string(r.assessment));
}

std::string format_report(const std::vector<TestResult>& results) {
  std::string out = report_header();
  for (const auto& r : results) out += format_row(r);
  return out;
}

std::string format_tsv(const std::vector<TestResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += fmt::format("{}\t{}\t{}\t{}\t{:.8f}\t{}\n", r.test_name, r.ntup, r.tsamples, r.psamples,
                       r.pvalue, to_string(r.assessment));
  }
  return out;
}

}  // namespace pcgwb::battery
