#include "pcgwb/battery/tests.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "pcgwb/battery/numerics.hpp"

namespace pcgwb::battery {

namespace {

std::size_t count_ones(const BitSequence& bits, std::size_t n) {
  const auto words = bits.words();
  std::size_t ones = 0;
  const std::size_t full = n / 32;
  for (std::size_t i = 0; i < full; ++i) ones += static_cast<std::size_t>(std::popcount(words[i]));
  for (std::size_t i = full * 32; i < n; ++i) ones += bits[i] ? 1 : 0;
  return ones;
}

void require_bits(const BitSequence& bits, const char* test) {
  if (bits.empty()) throw BatteryError(BatteryErrorKind::EmptyStream, fmt::format("{}: no bits", test));
}

}  // namespace

double monobit(const BitSequence& bits, std::size_t n) {
  require_bits(bits, "monobit");
  if (n == 0 || n > bits.size()) n = bits.size();
  const auto ones = static_cast<double>(count_ones(bits, n));
  const double sum = 2.0 * ones - static_cast<double>(n);
  const double s = std::fabs(sum) / std::sqrt(static_cast<double>(n));
  return std::erfc(s / std::sqrt(2.0));
}

double runs_test(const BitSequence& bits) {
  require_bits(bits, "runs");
  const std::size_t n = bits.size();
  const double nd = static_cast<double>(n);
  const double pi = static_cast<double>(count_ones(bits, n)) / nd;
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(nd)) return 0.0;
  std::size_t runs = 1;
  for (std::size_t i = 1; i < n; ++i) runs += bits[i] != bits[i - 1] ? 1 : 0;
  const double v = static_cast<double>(runs);
  const double spread = pi * (1.0 - pi);
  const double num = std::fabs(v - 2.0 * nd * spread);
  const double den = 2.0 * std::sqrt(2.0 * nd) * spread;
  return std::erfc(num / den);
}

std::vector<std::uint64_t> serial_counts(const BitSequence& bits, unsigned m) {
  const std::size_t n = bits.size();
  if (m == 0) return {n};
  if (m > 24) throw BatteryError(BatteryErrorKind::BadParameter, "serial_counts: m > 24");
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  if (n == 0) return counts;
  const std::uint32_t mask = (1u << m) - 1;
  std::uint32_t pattern = 0;
  for (unsigned j = 0; j + 1 < m; ++j) pattern = (pattern << 1) | (bits[j % n] ? 1u : 0u);
  for (std::size_t i = 0; i < n; ++i) {
    pattern = ((pattern << 1) | (bits[(i + m - 1) % n] ? 1u : 0u)) & mask;
    ++counts[pattern];
  }
  return counts;
}

double serial_psi_sq(const BitSequence& bits, int m) {
  if (m <= 0) return 0.0;
  const auto counts = serial_counts(bits, static_cast<unsigned>(m));
  const double n = static_cast<double>(bits.size());
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
  return std::ldexp(sum, m) / n - n;
}

SerialPValues serial_test(const BitSequence& bits, unsigned m) {
  require_bits(bits, "serial");
  if (m < 2) throw BatteryError(BatteryErrorKind::BadParameter, "serial test needs m >= 2");
  const double n = static_cast<double>(bits.size());
  if (std::ldexp(1.0, static_cast<int>(m)) > n / 5.0) {
    throw BatteryError(BatteryErrorKind::TupleTooLarge,
                       fmt::format("serial: 2^{} patterns too many for {} bits", m, bits.size()));
  }
  const int mi = static_cast<int>(m);
  const double psi_m = serial_psi_sq(bits, mi);
  const double psi_m1 = serial_psi_sq(bits, mi - 1);
  const double psi_m2 = serial_psi_sq(bits, mi - 2);
  // Rounding can push the differences slightly negative for perfectly
  // uniform input.
  const double del1 = std::max(0.0, psi_m - psi_m1);
  const double del2 = std::max(0.0, psi_m - 2.0 * psi_m1 + psi_m2);
  return {igamc(std::ldexp(1.0, mi - 2), del1 / 2.0), igamc(std::ldexp(1.0, mi - 3), del2 / 2.0)};
}

double birthday_lambda(const BirthdayParams& p) {
  const double m = p.nms;
  return m * m * m / std::ldexp(1.0, static_cast<int>(p.nbits) + 2);
}

unsigned birthday_duplicates(std::span<const std::uint32_t> words, const BirthdayParams& p) {
  std::vector<std::uint32_t> days(p.nms);
  const unsigned shift = 32 - p.nbits;
  for (unsigned i = 0; i < p.nms; ++i) days[i] = words[i] >> shift;
  std::sort(days.begin(), days.end());
  std::vector<std::uint32_t> spacings(p.nms);
  spacings[0] = days[0];
  for (unsigned i = 1; i < p.nms; ++i) spacings[i] = days[i] - days[i - 1];
  std::sort(spacings.begin(), spacings.end());
  unsigned dups = 0;
  for (unsigned i = 1; i < p.nms; ++i) dups += spacings[i] == spacings[i - 1] ? 1 : 0;
  return dups;
}

double birthday_spacings(std::span<const std::uint32_t> words, const BirthdayParams& p) {
  if (p.nbits < 1 || p.nbits > 32 || p.nms < 2 || p.experiments < 1) {
    throw BatteryError(BatteryErrorKind::BadParameter, "birthday_spacings: bad parameters");
  }
  const std::size_t need = p.experiments * p.nms;
  if (words.size() < need) {
    throw BatteryError(BatteryErrorKind::InsufficientData,
                       fmt::format("birthday_spacings: need {} words, have {}", need, words.size()));
  }
  std::vector<std::size_t> observed;
  for (std::size_t e = 0; e < p.experiments; ++e) {
    const unsigned k = birthday_duplicates(words.subspan(e * p.nms, p.nms), p);
    if (k >= observed.size()) observed.resize(k + 1, 0);
    ++observed[k];
  }

  // Poisson bins 0, 1, ... while both the bin and the remaining tail expect
  // at least five hits; the last bin takes the whole tail.
  const double lambda = birthday_lambda(p);
  const double total = static_cast<double>(p.experiments);
  std::vector<double> expected;
  double pk = std::exp(-lambda);
  double tail = 1.0;
  for (unsigned k = 0;; ++k) {
    if (pk * total < 5.0 || (tail - pk) * total < 5.0) break;
    expected.push_back(pk * total);
    tail -= pk;
    pk *= lambda / (k + 1);
  }
  expected.push_back(std::max(tail, 0.0) * total);
  if (expected.size() < 2) {
    throw BatteryError(BatteryErrorKind::BadParameter,
                       "birthday_spacings: too few experiments for a chi-square test");
  }

  double chi = 0.0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    double obs = 0.0;
    if (b + 1 < expected.size()) {
      obs = b < observed.size() ? static_cast<double>(observed[b]) : 0.0;
    } else {
      for (std::size_t k = b; k < observed.size(); ++k) obs += static_cast<double>(observed[k]);
    }
    const double diff = obs - expected[b];
    chi += diff * diff / expected[b];
  }
  return chisq_pvalue(chi, static_cast<double>(expected.size() - 1));
}

unsigned gf2_rank(std::span<const std::uint32_t> rows) {
  std::vector<std::uint32_t> m(rows.begin(), rows.end());
  unsigned rank = 0;
  for (int bit = 31; bit >= 0 && rank < m.size(); --bit) {
    const std::uint32_t col = 1u << bit;
    std::size_t pivot = rank;
    while (pivot < m.size() && !(m[pivot] & col)) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r != rank && (m[r] & col)) m[r] ^= m[rank];
    }
    ++rank;
  }
  return rank;
}

double rank_probability(unsigned r, unsigned rows, unsigned cols) {
  if (r > std::min(rows, cols)) return 0.0;
  const int ri = static_cast<int>(r);
  const int mi = static_cast<int>(rows);
  const int qi = static_cast<int>(cols);
  double p = std::ldexp(1.0, ri * (qi + mi - ri) - mi * qi);
  for (int i = 0; i < ri; ++i) {
    p *= (1.0 - std::ldexp(1.0, i - qi)) * (1.0 - std::ldexp(1.0, i - mi)) /
         (1.0 - std::ldexp(1.0, i - ri));
  }
  return p;
}

double binary_rank_32(std::span<const std::uint32_t> words, std::size_t matrices) {
  if (matrices == 0) throw BatteryError(BatteryErrorKind::BadParameter, "rank: no matrices");
  if (words.size() < matrices * 32) {
    throw BatteryError(BatteryErrorKind::InsufficientData,
                       fmt::format("rank_32x32: need {} words, have {}", matrices * 32, words.size()));
  }
  double observed[3] = {0, 0, 0};  // rank 32, 31, <= 30
  for (std::size_t k = 0; k < matrices; ++k) {
    const unsigned r = gf2_rank(words.subspan(k * 32, 32));
    ++observed[r == 32 ? 0 : r == 31 ? 1 : 2];
  }
  const double p32 = rank_probability(32);
  const double p31 = rank_probability(31);
  const double probs[3] = {p32, p31, 1.0 - p32 - p31};
  const double n = static_cast<double>(matrices);
  double chi = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double e = n * probs[b];
    chi += (observed[b] - e) * (observed[b] - e) / e;
  }
  return chisq_pvalue(chi, 2.0);
}

}  // namespace pcgwb::battery
