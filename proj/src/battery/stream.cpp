#include "pcgwb/battery/stream.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcgwb::battery {

namespace {
std::uint32_t load_be(const std::uint8_t* p) noexcept {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}
}  // namespace

DecodedWords read_words(std::span<const std::uint8_t> bytes) {
  DecodedWords out;
  const std::size_t n = bytes.size() / 4;
  out.words.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.words.push_back(load_be(bytes.data() + 4 * i));
  out.dropped_bytes = bytes.size() % 4;
  return out;
}

void append_words(std::span<const std::uint32_t> words, std::vector<std::uint8_t>& out) {
  const std::size_t base = out.size();
  out.resize(base + 4 * words.size());
  std::uint8_t* p = out.data() + base;
  for (std::uint32_t w : words) {
    *p++ = static_cast<std::uint8_t>(w >> 24);
    *p++ = static_cast<std::uint8_t>(w >> 16);
    *p++ = static_cast<std::uint8_t>(w >> 8);
    *p++ = static_cast<std::uint8_t>(w);
  }
}

std::size_t IstreamWordSource::read(std::span<std::uint32_t> out) {
  buffer_.resize(out.size() * 4);
  in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()));
  const auto got = static_cast<std::size_t>(in_.gcount());
  const std::size_t words = got / 4;
  for (std::size_t i = 0; i < words; ++i) out[i] = load_be(buffer_.data() + 4 * i);
  if (words < out.size()) dropped_ += got % 4;
  return words;
}

std::size_t SpanWordSource::read(std::span<std::uint32_t> out) {
  const std::size_t n = std::min(out.size(), words_.size() - pos_);
  std::copy_n(words_.begin() + static_cast<std::ptrdiff_t>(pos_), n, out.begin());
  pos_ += n;
  return n;
}

BitSequence::BitSequence(std::vector<std::uint32_t> words, std::size_t nbits)
    : words_(std::move(words)), nbits_(nbits) {
  if (nbits_ > words_.size() * 32) throw std::invalid_argument("BitSequence: too few words");
}

BitSequence BitSequence::from_string(const std::string& bits) {
  std::vector<std::uint32_t> words((bits.size() + 31) / 32, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      words[i >> 5] |= 1u << (31 - (i & 31));
    } else if (bits[i] != '0') {
      throw std::invalid_argument("BitSequence::from_string: expected only '0' and '1'");
    }
  }
  return BitSequence(std::move(words), bits.size());
}

BitSequence BitSequence::prefix(std::size_t n) const {
  n = std::min(n, nbits_);
  std::vector<std::uint32_t> words(words_.begin(), words_.begin() + static_cast<std::ptrdiff_t>((n + 31) / 32));
  if (n % 32 != 0) words.back() &= ~std::uint32_t{0} << (32 - n % 32);
  return BitSequence(std::move(words), n);
}

std::string BitSequence::to_string() const {
  std::string s(nbits_, '0');
  for (std::size_t i = 0; i < nbits_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

BitSequence bits_of(std::span<const std::uint32_t> words) {
  return BitSequence(std::vector<std::uint32_t>(words.begin(), words.end()), words.size() * 32);
}

}  // namespace pcgwb::battery
