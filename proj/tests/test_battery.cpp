#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "pcgwb/battery/battery.hpp"
#include "pcgwb/battery/numerics.hpp"
#include "pcgwb/pcg.hpp"

using namespace pcgwb;
using namespace pcgwb::battery;

namespace {

std::string alternating(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i % 2) ? '1' : '0';
  return s;
}

// Direct enumeration: for each start position, read m bits with wrap.
std::vector<std::uint64_t> brute_counts(const std::string& bits, unsigned m) {
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  const std::size_t n = bits.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t v = 0;
    for (unsigned j = 0; j < m; ++j) v = v * 2 + (bits[(i + j) % n] == '1');
    ++counts[v];
  }
  return counts;
}

// Rank as log2 of the size of the row span, found by enumerating all
// subsets of rows.
unsigned span_rank(const std::vector<std::uint32_t>& rows) {
  std::set<std::uint32_t> span;
  for (std::uint32_t mask = 0; mask < (1u << rows.size()); ++mask) {
    std::uint32_t v = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (mask & (1u << r)) v ^= rows[r];
    }
    span.insert(v);
  }
  unsigned rank = 0;
  while ((std::size_t{1} << rank) < span.size()) ++rank;
  return rank;
}

// Order-m de Bruijn sequence (Fredricksen-Kessler-Maiorana).
std::string de_bruijn(unsigned m) {
  std::string out;
  std::vector<int> a(m + 1, 0);
  std::function<void(unsigned, unsigned)> db = [&](unsigned t, unsigned p) {
    if (t > m) {
      if (m % p == 0) {
        for (unsigned i = 1; i <= p; ++i) out += static_cast<char>('0' + a[i]);
      }
      return;
    }
    a[t] = a[t - p];
    db(t + 1, p);
    for (int j = a[t - p] + 1; j < 2; ++j) {
      a[t] = j;
      db(t + 1, t);
    }
  };
  db(1, 1);
  return out;
}

}  // namespace

TEST_CASE("read_words is big-endian") {
  const std::vector<std::uint8_t> one = {0, 0, 0, 1};
  CHECK(read_words(one).words == std::vector<std::uint32_t>{1});
  const std::vector<std::uint8_t> dead = {0xDE, 0xAD, 0xBE, 0xEF};
  CHECK(read_words(dead).words == std::vector<std::uint32_t>{0xDEADBEEF});
  const std::vector<std::uint8_t> five = {1, 2, 3, 4, 5};
  const auto d = read_words(five);
  CHECK(d.words == std::vector<std::uint32_t>{0x01020304});
  CHECK(d.dropped_bytes == 1);

  std::vector<std::uint8_t> bytes;
  const std::vector<std::uint32_t> words = {0xDEADBEEF, 7};
  append_words(words, bytes);
  CHECK(bytes == std::vector<std::uint8_t>{0xDE, 0xAD, 0xBE, 0xEF, 0, 0, 0, 7});
  CHECK(read_words(bytes).words == words);

  std::istringstream in(std::string("\xDE\xAD\xBE\xEF\x01", 5));
  IstreamWordSource src(in);
  std::vector<std::uint32_t> buf(4);
  CHECK(src.read(buf) == 1);
  CHECK(buf[0] == 0xDEADBEEF);
  CHECK(src.dropped_bytes() == 1);
}

TEST_CASE("bits_of is MSB first") {
  CHECK(bits_of(std::vector<std::uint32_t>{0x80000000u}).to_string() == "1" + std::string(31, '0'));
  CHECK(bits_of(std::vector<std::uint32_t>{1}).to_string() == std::string(31, '0') + "1");
  CHECK(bits_of(std::vector<std::uint32_t>{}).empty());
  CHECK(BitSequence::from_string("1011").prefix(3).to_string() == "101");
}

TEST_CASE("monobit") {
  CHECK(monobit(BitSequence::from_string("1011010101")) == doctest::Approx(0.527089).epsilon(1e-5));
  CHECK(monobit(BitSequence::from_string("1011010101")) ==
        doctest::Approx(0.5270892568655381).epsilon(1e-12));
  CHECK(monobit(BitSequence::from_string(std::string(100, '0'))) == doctest::Approx(std::erfc(std::sqrt(50.0))));
  CHECK(assess(monobit(BitSequence::from_string(std::string(100, '0')))) == Assessment::Failed);
  CHECK(monobit(BitSequence::from_string(alternating(64))) == 1.0);
  CHECK_THROWS_AS(monobit(BitSequence{}), BatteryError);
}

TEST_CASE("runs") {
  CHECK(runs_test(BitSequence::from_string("1001101011")) == doctest::Approx(0.147232).epsilon(1e-5));
  CHECK(runs_test(BitSequence::from_string("1001101011")) ==
        doctest::Approx(0.14723225536366571).epsilon(1e-12));
  CHECK(runs_test(BitSequence::from_string(alternating(100))) < 1e-6);
  CHECK(runs_test(BitSequence::from_string(std::string(100, '1'))) == 0.0);
}

TEST_CASE("serial counts equal brute force on every stream up to 12 bits") {
  std::size_t streams = 0;
  for (unsigned n = 1; n <= 12; ++n) {
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
      std::string s;
      for (unsigned i = 0; i < n; ++i) s += ((v >> (n - 1 - i)) & 1) ? '1' : '0';
      const BitSequence bits = BitSequence::from_string(s);
      for (unsigned m : {2u, 3u, 4u}) {
        if (serial_counts(bits, m) != brute_counts(s, m)) {
          FAIL("mismatch for ", s, " m=", m);
        }
      }
      ++streams;
    }
  }
  CHECK(streams == 8190);
}

TEST_CASE("serial test") {
  SUBCASE("repeated de Bruijn cycles are perfectly uniform") {
    for (unsigned m : {2u, 3u, 4u, 5u}) {
      const std::string cycle = de_bruijn(m);
      REQUIRE(cycle.size() == (1u << m));
      std::string s;
      while (s.size() < 10 * cycle.size()) s += cycle;
      const auto p = serial_test(BitSequence::from_string(s), m);
      CHECK(p.p1 == doctest::Approx(1.0));
      CHECK(p.p2 == doctest::Approx(1.0));
    }
  }
  SUBCASE("all zeros") {
    CHECK(serial_test(BitSequence::from_string(std::string(1000, '0')), 2).p1 < 1e-10);
  }
  SUBCASE("tuple too large") {
    try {
      serial_test(BitSequence::from_string(std::string(50, '0')), 4);
      FAIL("expected TupleTooLarge");
    } catch (const BatteryError& e) {
      CHECK(e.kind() == BatteryErrorKind::TupleTooLarge);
    }
  }
  SUBCASE("golden stream, m = 4") {
    const auto words = pcg::golden_stream({42}, 3125);
    const BitSequence bits(words, 100000);
    const auto p = serial_test(bits, 4);
    CHECK(assess(p.p1) != Assessment::Failed);
    CHECK(assess(p.p2) != Assessment::Failed);

    // psi-squared on a 1000-bit prefix, recomputed from brute-force counts
    const BitSequence prefix = bits.prefix(1000);
    const std::string text = prefix.to_string();
    for (int k : {2, 3, 4}) {
      double sum = 0;
      for (auto c : brute_counts(text, static_cast<unsigned>(k))) sum += static_cast<double>(c) * c;
      CHECK(serial_psi_sq(prefix, k) == doctest::Approx(std::ldexp(sum, k) / 1000.0 - 1000.0));
    }
  }
}

TEST_CASE("birthday spacings") {
  CHECK(birthday_lambda({}) == 2.0);
  SUBCASE("identical words") {
    const std::vector<std::uint32_t> same(512 * 100, 0x12345678);
    CHECK(birthday_duplicates(same, {}) == 510);
    CHECK(birthday_spacings(same) < 1e-10);
  }
  SUBCASE("golden stream, 20 samples combined") {
    const auto words = pcg::golden_stream({7}, 512 * 100 * 20);
    std::vector<double> ps;
    for (int s = 0; s < 20; ++s) {
      ps.push_back(birthday_spacings(std::span(words).subspan(s * 51200, 51200)));
    }
    CHECK(assess(ks_uniform(ps)) != Assessment::Failed);
  }
  SUBCASE("short input") {
    const std::vector<std::uint32_t> few(100, 1);
    CHECK_THROWS_AS(birthday_spacings(few), BatteryError);
  }
}

TEST_CASE("GF(2) rank matches span enumeration for every matrix up to 4x4") {
  for (unsigned n = 1; n <= 4; ++n) {
    const std::uint32_t cells = n * n;
    for (std::uint32_t bits = 0; bits < (1u << cells); ++bits) {
      std::vector<std::uint32_t> rows(n);
      for (unsigned r = 0; r < n; ++r) rows[r] = (bits >> (r * n)) & ((1u << n) - 1);
      if (gf2_rank(rows) != span_rank(rows)) FAIL("rank mismatch for n=", n, " bits=", bits);
    }
  }
  CHECK(gf2_rank(std::vector<std::uint32_t>(32, 0)) == 0);
}

TEST_CASE("rank probabilities and the 32x32 test") {
  CHECK(rank_probability(32) == doctest::Approx(0.28878809515384113).epsilon(1e-12));
  CHECK(rank_probability(31) == doctest::Approx(0.5775761901732046).epsilon(1e-12));
  CHECK(1.0 - rank_probability(32) - rank_probability(31) ==
        doctest::Approx(0.13363571467295432).epsilon(1e-10));
  double total = 0;
  for (unsigned r = 0; r <= 32; ++r) total += rank_probability(r);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<std::uint32_t> identity;
  for (int m = 0; m < 100; ++m) {
    for (int r = 0; r < 32; ++r) identity.push_back(1u << r);
  }
  CHECK(binary_rank_32(identity, 100) < 1e-6);
  CHECK(binary_rank_32(std::vector<std::uint32_t>(3200, 0), 100) < 1e-10);
  const auto words = pcg::golden_stream({3}, 32 * 10000);
  CHECK(assess(binary_rank_32(words, 10000)) != Assessment::Failed);
}

TEST_CASE("assess") {
  CHECK(assess(0.90426759) == Assessment::Passed);
  CHECK(assess(0.00008413) == Assessment::Weak);
  CHECK(assess(0.0) == Assessment::Failed);
  CHECK(assess(0.9999999) == Assessment::Failed);
  CHECK(assess(0.996) == Assessment::Weak);
  CHECK(assess(0.005) == Assessment::Passed);
  CHECK(assess(1e-6) == Assessment::Weak);
  CHECK(std::string(to_string(Assessment::Weak)) == "WEAK");
}

TEST_CASE("report formatting") {
  CHECK(format_report({}) == report_header());
  const TestResult r{"sts_monobit", 1, 100000, 20, 0.5, Assessment::Passed};
  const std::string row = format_row(r);
  CHECK(row == "              sts_monobit|   1|    100000|      20|0.50000000|  PASSED\n");
  // columns line up with the header's separators
  const std::string header = report_header();
  const std::string titles = header.substr(header.find('\n') + 1);
  std::size_t h = 0, c = 0;
  for (int i = 0; i < 5; ++i) {
    h = titles.find('|', h + 1);
    c = row.find('|', c + 1);
    CHECK(h == c);
  }
  CHECK(format_tsv({r}) == "sts_monobit\t1\t100000\t20\t0.50000000\tPASSED\n");
}

TEST_CASE("test names") {
  CHECK(parse_test_id("monobit") == TestId::Monobit);
  CHECK(parse_test_id("sts_serial") == TestId::Serial);
  CHECK(parse_test_id("rank32") == TestId::Rank32);
  CHECK_FALSE(parse_test_id("opso").has_value());
}

TEST_CASE("run_battery on a zero stream") {
  const std::vector<std::uint32_t> zeros(100000, 0);
  SpanWordSource src(zeros);
  BatterySizes sizes;
  sizes.bit_tsamples = 1000;
  sizes.psamples = 1;
  const auto run = run_battery(src, {TestId::Monobit}, sizes);
  REQUIRE(run.results.size() == 1);
  CHECK(run.results[0].assessment == Assessment::Failed);
  CHECK(run.any_failed());
}

TEST_CASE("run_battery skips tests it cannot feed") {
  const auto words = pcg::golden_stream({1}, 5000);
  SpanWordSource src(words);
  BatterySizes sizes;
  sizes.bit_tsamples = 4000;
  sizes.psamples = 10;
  const auto run = run_battery(src, {TestId::Monobit, TestId::Runs, TestId::Rank32}, sizes);
  REQUIRE(run.results.size() == 2);
  CHECK(run.results[0].test_name == "sts_monobit");
  CHECK(run.results[1].test_name == "sts_runs");
  REQUIRE(run.notices.size() == 1);
  CHECK(run.notices[0].find("diehard_rank_32x32") != std::string::npos);
}

TEST_CASE("run_battery drops oversize serial tuples with a notice") {
  const auto words = pcg::golden_stream({1}, 10000);
  SpanWordSource src(words);
  BatterySizes sizes;
  sizes.bit_tsamples = 64;  // 2^4 > 64 / 5
  sizes.psamples = 2;
  const auto run = run_battery(src, {TestId::Serial}, sizes);
  CHECK(run.results.size() == 2);  // m = 2 only
  CHECK(run.notices.size() == 2);  // m = 4 and m = 8
}

TEST_CASE("serial and OpenMP kernels agree exactly") {
  BatterySizes sizes;
  sizes.bit_tsamples = 20000;
  sizes.psamples = 8;
  sizes.rank_tsamples = 500;
  for (TestId t : all_tests()) {
    const auto words = pcg::golden_stream({static_cast<std::uint64_t>(t) + 10},
                                          words_per_sample(t, sizes) * sizes.psamples);
    CHECK(sample_pvalues(t, words, sizes, Exec::Serial) == sample_pvalues(t, words, sizes, Exec::Parallel));
  }
  const auto words = pcg::golden_stream({5}, 1'000'000);
  SpanWordSource a(words), b(words);
  const auto ra = run_battery(a, all_tests(), sizes, Exec::Serial);
  const auto rb = run_battery(b, all_tests(), sizes, Exec::Parallel);
  CHECK(format_tsv(ra.results) == format_tsv(rb.results));
}

TEST_CASE("kernel errors propagate out of the parallel region") {
  BatterySizes sizes;
  sizes.psamples = 4;
  const std::vector<std::uint32_t> few(10);
  CHECK_THROWS_AS(sample_pvalues(TestId::Rank32, few, sizes, Exec::Parallel), BatteryError);
}

TEST_CASE("null uniformity over 200 golden substreams") {
  const std::size_t bits = 20000, words_each = bits / 32;
  const auto words = pcg::golden_stream({123456789}, 200 * words_each);
  std::vector<double> mono, runs, ser1, ser2;
  for (std::size_t s = 0; s < 200; ++s) {
    const BitSequence b(std::vector<std::uint32_t>(words.begin() + s * words_each,
                                                   words.begin() + (s + 1) * words_each),
                        bits);
    mono.push_back(monobit(b));
    runs.push_back(runs_test(b));
    const auto p = serial_test(b, 4);
    ser1.push_back(p.p1);
    ser2.push_back(p.p2);
  }
  CHECK(ks_uniform(mono) > 1e-4);
  CHECK(ks_uniform(runs) > 1e-4);
  CHECK(ks_uniform(ser1) > 1e-4);
  CHECK(ks_uniform(ser2) > 1e-4);
}

TEST_CASE("fuzz: every p-value lies in [0, 1]") {
  std::mt19937_64 rng(8);
  auto in_range = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::uint32_t> w(51200);
    const int kind = trial % 4;
    for (auto& x : w) {
      x = kind == 0   ? static_cast<std::uint32_t>(rng())
          : kind == 1 ? 0xFFFFFFFFu
          : kind == 2 ? 0xAAAAAAAAu
                      : static_cast<std::uint32_t>(rng() & 0x0F0F0F0F);
    }
    const BitSequence b = bits_of(std::span(w).first(400));
    CHECK(in_range(monobit(b)));
    CHECK(in_range(runs_test(b)));
    const auto s = serial_test(b, 3);
    CHECK(in_range(s.p1));
    CHECK(in_range(s.p2));
    BirthdayParams bp;
    CHECK(in_range(birthday_spacings(w, bp)));
    CHECK(in_range(binary_rank_32(w, 1600)));
  }
}
