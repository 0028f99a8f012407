#include "sturm/word.hpp"

#include <algorithm>
#include <bit>

namespace sturm {

Word Word::from_string(std::string_view s) {
  Word w;
  w.reserve_letters(s.size());
  for (char c : s) {
    if (c == '0') {
      w.push_back(0);
    } else if (c == '1') {
      w.push_back(1);
    } else {
      throw ConfigError("word literal may contain only '0' and '1'");
    }
  }
  return w;
}

Word Word::filled(std::uint64_t count, int letter) {
  Word w;
  w.limbs_.assign((count + 63) >> 6, letter ? ~std::uint64_t{0} : 0);
  w.size_ = count;
  if (letter && (count & 63)) w.limbs_.back() &= (std::uint64_t{1} << (count & 63)) - 1;
  return w;
}

void Word::push_back(int letter) {
  if ((size_ & 63) == 0) limbs_.push_back(0);
  if (letter) limbs_.back() |= std::uint64_t{1} << (size_ & 63);
  ++size_;
}

void Word::append(const Word& other) {
  if (other.empty()) return;
  const unsigned shift = size_ & 63;
  limbs_.reserve((size_ + other.size_ + 63) >> 6);
  if (shift == 0) {
    limbs_.insert(limbs_.end(), other.limbs_.begin(), other.limbs_.end());
  } else {
    for (std::uint64_t limb : other.limbs_) {
      limbs_.back() |= limb << shift;
      limbs_.push_back(limb >> (64 - shift));
    }
    // Drop a final limb that holds no letters.
    if (((size_ + other.size_ + 63) >> 6) < limbs_.size()) limbs_.pop_back();
  }
  size_ += other.size_;
}

void Word::append_copies(const Word& other, std::uint64_t count) {
  reserve_letters(size_ + count * other.size());
  for (std::uint64_t i = 0; i < count; ++i) append(other);
}

Word Word::subword(std::uint64_t pos, std::uint64_t len) const {
  if (pos > size_ || len > size_ - pos) throw ConfigError("subword range out of bounds");
  Word out;
  out.size_ = len;
  out.limbs_.assign((len + 63) >> 6, 0);
  const std::uint64_t first = pos >> 6;
  const unsigned shift = pos & 63;
  for (std::size_t i = 0; i < out.limbs_.size(); ++i) {
    std::uint64_t limb = limbs_[first + i] >> shift;
    if (shift && first + i + 1 < limbs_.size()) limb |= limbs_[first + i + 1] << (64 - shift);
    out.limbs_[i] = limb;
  }
  if (len & 63) out.limbs_.back() &= (std::uint64_t{1} << (len & 63)) - 1;
  return out;
}

Word Word::reversed() const {
  Word out;
  out.size_ = size_;
  out.limbs_.assign(limbs_.size(), 0);
  for (std::uint64_t i = 0; i < size_; ++i) {
    if (letter(size_ - 1 - i)) out.limbs_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  return out;
}

bool Word::is_palindrome() const {
  for (std::uint64_t i = 0, j = size_; i < j / 2; ++i) {
    if (letter(i) != letter(size_ - 1 - i)) return false;
  }
  return true;
}

std::uint64_t Word::count_ones() const {
  std::uint64_t n = 0;
  for (std::uint64_t limb : limbs_) n += std::popcount(limb);
  return n;
}

bool Word::is_prefix_of(const Word& w) const {
  if (size_ > w.size_) return false;
  const std::uint64_t full = size_ >> 6;
  for (std::uint64_t i = 0; i < full; ++i) {
    if (limbs_[i] != w.limbs_[i]) return false;
  }
  if (size_ & 63) {
    const std::uint64_t mask = (std::uint64_t{1} << (size_ & 63)) - 1;
    if ((limbs_[full] ^ w.limbs_[full]) & mask) return false;
  }
  return true;
}

bool Word::is_suffix_of(const Word& w) const {
  if (size_ > w.size_) return false;
  return w.subword(w.size_ - size_, size_) == *this;
}

std::uint64_t Word::find(const Word& needle, std::uint64_t from) const {
  if (needle.size_ == 0) return from <= size_ ? from : npos;
  if (needle.size_ > size_ || from > size_ - needle.size_) return npos;
  // Packed compare: the needle's first limb against a shifted window, then the rest.
  for (std::uint64_t pos = from; pos + needle.size_ <= size_; ++pos) {
    if (letter(pos) != needle.letter(0)) continue;
    std::uint64_t i = 0;
    const std::uint64_t full = needle.size_ >> 6;
    const std::uint64_t first = pos >> 6;
    const unsigned shift = pos & 63;
    bool match = true;
    for (; i < full; ++i) {
      std::uint64_t limb = limbs_[first + i] >> shift;
      if (shift && first + i + 1 < limbs_.size()) limb |= limbs_[first + i + 1] << (64 - shift);
      if (limb != needle.limbs_[i]) {
        match = false;
        break;
      }
    }
    if (match && (needle.size_ & 63)) {
      std::uint64_t limb = limbs_[first + i] >> shift;
      if (shift && first + i + 1 < limbs_.size()) limb |= limbs_[first + i + 1] << (64 - shift);
      const std::uint64_t mask = (std::uint64_t{1} << (needle.size_ & 63)) - 1;
      if ((limb ^ needle.limbs_[i]) & mask) match = false;
    }
    if (match) return pos;
  }
  return npos;
}

std::strong_ordering Word::operator<=>(const Word& o) const {
  if (auto c = size_ <=> o.size_; c != 0) return c;
  if (auto c = limbs_ <=> o.limbs_; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Word::str() const {
  std::string s(size_, '0');
  for (std::uint64_t i = 0; i < size_; ++i) s[i] = letter(i) ? '1' : '0';
  return s;
}

}  // namespace sturm
