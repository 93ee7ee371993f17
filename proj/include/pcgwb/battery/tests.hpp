#pragma once

// Single-sample statistics. Each returns a p-value in [0, 1].

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcgwb/battery/stream.hpp"

namespace pcgwb::battery {

enum class BatteryErrorKind { EmptyStream, TupleTooLarge, InsufficientData, BadParameter };

class BatteryError : public std::runtime_error {
 public:
  BatteryError(BatteryErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  BatteryErrorKind kind() const noexcept { return kind_; }

 private:
  BatteryErrorKind kind_;
};

/// Frequency (monobit) test over the first `n` bits (all bits when n == 0).
double monobit(const BitSequence& bits, std::size_t n = 0);

/// Runs test. Returns 0 when the ones fraction fails the frequency
/// prerequisite |pi - 1/2| < 2/sqrt(n).
double runs_test(const BitSequence& bits);

/// Overlapping m-bit pattern counts with wrap-around; index = pattern value
/// with the earliest bit most significant. m == 0 yields {n}.
std::vector<std::uint64_t> serial_counts(const BitSequence& bits, unsigned m);

/// psi-squared statistic for m-bit patterns (0 for m <= 0).
double serial_psi_sq(const BitSequence& bits, int m);

struct SerialPValues {
  double p1;  // first difference
  double p2;  // second difference
};

/// Serial test for tuple size m >= 2; TupleTooLarge when 2^m > n/5.
SerialPValues serial_test(const BitSequence& bits, unsigned m);

struct BirthdayParams {
  unsigned nms = 512;     // birthdays per experiment
  unsigned nbits = 24;    // bits per birthday (top bits of each word)
  std::size_t experiments = 100;
};

/// Expected duplicate-spacing count nms^3 / 2^(nbits + 2).
double birthday_lambda(const BirthdayParams& params);

/// Duplicated spacings for one experiment over params.nms words.
unsigned birthday_duplicates(std::span<const std::uint32_t> words, const BirthdayParams& params);

/// Chi-square p-value of the duplicate counts of params.experiments
/// consecutive experiments against Poisson(lambda). Needs
/// experiments * nms words.
double birthday_spacings(std::span<const std::uint32_t> words, const BirthdayParams& params = {});

/// Rank over GF(2) of a matrix whose rows are the given words.
unsigned gf2_rank(std::span<const std::uint32_t> rows);

/// Probability that a random rows x cols binary matrix has rank r.
double rank_probability(unsigned r, unsigned rows = 32, unsigned cols = 32);

/// 32x32 binary rank test over `matrices` consecutive 32-word matrices,
/// chi-square (2 dof) over the rank bins {32, 31, <=30}.
double binary_rank_32(std::span<const std::uint32_t> words, std::size_t matrices);

}  // namespace pcgwb::battery
