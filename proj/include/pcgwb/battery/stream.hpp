#pragma once

// Raw 32-bit word streams in dieharder's stdin_input_raw layout: unsigned
// words, most significant byte first.

#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace pcgwb::battery {

struct DecodedWords {
  std::vector<std::uint32_t> words;
  std::size_t dropped_bytes = 0;  // incomplete trailing group
};

DecodedWords read_words(std::span<const std::uint8_t> bytes);

/// Append `words` big-endian to `out`.
void append_words(std::span<const std::uint32_t> words, std::vector<std::uint8_t>& out);

/// Pull-based word source. `read` fills as many words as it can; a short
/// count means the source is exhausted.
class WordSource {
 public:
  virtual ~WordSource() = default;
  virtual std::size_t read(std::span<std::uint32_t> out) = 0;
  /// Bytes discarded because the stream ended mid-word.
  virtual std::size_t dropped_bytes() const { return 0; }
};

class IstreamWordSource final : public WordSource {
 public:
  explicit IstreamWordSource(std::istream& in) : in_(in) {}
  std::size_t read(std::span<std::uint32_t> out) override;
  std::size_t dropped_bytes() const override { return dropped_; }

 private:
  std::istream& in_;
  std::vector<std::uint8_t> buffer_;
  std::size_t dropped_ = 0;
};

class GeneratorWordSource final : public WordSource {
 public:
  explicit GeneratorWordSource(std::function<std::uint32_t()> next) : next_(std::move(next)) {}
  std::size_t read(std::span<std::uint32_t> out) override {
    for (auto& w : out) w = next_();
    return out.size();
  }

 private:
  std::function<std::uint32_t()> next_;
};

class SpanWordSource final : public WordSource {
 public:
  explicit SpanWordSource(std::span<const std::uint32_t> words) : words_(words) {}
  std::size_t read(std::span<std::uint32_t> out) override;

 private:
  std::span<const std::uint32_t> words_;
  std::size_t pos_ = 0;
};

/// Bits in stream order: each word contributes 32 bits, MSB first.
class BitSequence {
 public:
  BitSequence() = default;
  BitSequence(std::vector<std::uint32_t> words, std::size_t nbits);
  /// From a string of '0'/'1' characters.
  static BitSequence from_string(const std::string& bits);

  std::size_t size() const noexcept { return nbits_; }
  bool empty() const noexcept { return nbits_ == 0; }
  bool operator[](std::size_t i) const noexcept {
    return (words_[i >> 5] >> (31 - (i & 31))) & 1u;
  }
  std::span<const std::uint32_t> words() const noexcept { return words_; }
  /// The first `n` bits.
  BitSequence prefix(std::size_t n) const;
  std::string to_string() const;

 private:
  std::vector<std::uint32_t> words_;
  std::size_t nbits_ = 0;
};

BitSequence bits_of(std::span<const std::uint32_t> words);

}  // namespace pcgwb::battery
