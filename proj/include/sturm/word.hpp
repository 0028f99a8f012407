#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sturm/errors.hpp"

namespace sturm {

// A finite binary word over {0,1}, bit-packed 64 letters per limb.
// Letter positions are 0-based; unused high bits of the last limb stay zero
// so that limb-wise comparison equals letter-wise comparison.
class Word {
 public:
  static constexpr std::uint64_t npos = ~std::uint64_t{0};

  Word() = default;

  static Word from_string(std::string_view s);
  static Word filled(std::uint64_t count, int letter);

  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  int letter(std::uint64_t i) const {
    return static_cast<int>((limbs_[i >> 6] >> (i & 63)) & 1u);
  }
  int operator[](std::uint64_t i) const { return letter(i); }

  void push_back(int letter);
  void append(const Word& other);
  // Appends `count` copies of `other`.
  void append_copies(const Word& other, std::uint64_t count);

  // Letters [pos, pos+len), 0-based.
  Word subword(std::uint64_t pos, std::uint64_t len) const;
  Word prefix(std::uint64_t len) const { return subword(0, len); }
  Word suffix(std::uint64_t len) const { return subword(size_ - len, len); }

  Word reversed() const;
  bool is_palindrome() const;

  std::uint64_t count_ones() const;
  std::uint64_t count_zeros() const { return size_ - count_ones(); }

  bool is_prefix_of(const Word& w) const;
  bool is_suffix_of(const Word& w) const;

  // First occurrence of `needle` starting at or after `from`; npos if absent.
  std::uint64_t find(const Word& needle, std::uint64_t from = 0) const;
  bool contains(const Word& needle) const { return find(needle) != npos; }

  bool operator==(const Word& o) const { return size_ == o.size_ && limbs_ == o.limbs_; }
  // Any strict total order usable for ordered containers: by length, then limbs.
  std::strong_ordering operator<=>(const Word& o) const;

  // One byte per letter, '0'/'1'; also what the linear-time scanners consume.
  std::string str() const;

  const std::vector<std::uint64_t>& limbs() const { return limbs_; }
  void reserve_letters(std::uint64_t n) { limbs_.reserve((n + 63) >> 6); }

 private:
  std::vector<std::uint64_t> limbs_;
  std::uint64_t size_ = 0;
};

}  // namespace sturm
