#include <doctest.h>

#include <algorithm>
#include <string>

#include "sturm/random.hpp"
#include "sturm/word.hpp"

namespace {

using sturm::ConfigError;
using sturm::DetRng;
using sturm::Word;

std::string random_binary(DetRng& rng, std::uint64_t len) {
  std::string s;
  for (std::uint64_t i = 0; i < len; ++i) s.push_back(rng.below(2) ? '1' : '0');
  return s;
}

}  // namespace

TEST_CASE("word round-trips strings across limb boundaries") {
  DetRng rng(11);
  for (std::uint64_t len : {0, 1, 7, 31, 63, 64, 65, 127, 128, 129, 500}) {
    const std::string s = random_binary(rng, len);
    const Word w = Word::from_string(s);
    REQUIRE(w.size() == len);
    CHECK(w.str() == s);
    for (std::uint64_t i = 0; i < len; ++i) {
      CHECK(w.letter(i) == s[i] - '0');
      CHECK(w[i] == s[i] - '0');
    }
  }
  CHECK_THROWS_AS(Word::from_string("0102"), ConfigError);
}

TEST_CASE("push_back, append and append_copies agree with string concatenation") {
  DetRng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::string sa = random_binary(rng, rng.below(150));
    const std::string sb = random_binary(rng, rng.below(150));
    Word w = Word::from_string(sa);
    for (char ch : sb) w.push_back(ch - '0');
    CHECK(w.str() == sa + sb);

    Word u = Word::from_string(sa);
    u.append(Word::from_string(sb));
    CHECK(u.str() == sa + sb);

    const std::uint64_t k = rng.below(5);
    Word v = Word::from_string(sa);
    v.append_copies(Word::from_string(sb), k);
    std::string expect = sa;
    for (std::uint64_t i = 0; i < k; ++i) expect += sb;
    CHECK(v.str() == expect);
  }
}

TEST_CASE("subword, prefix and suffix match substr") {
  DetRng rng(13);
  const std::string s = random_binary(rng, 300);
  const Word w = Word::from_string(s);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t pos = rng.below(s.size() + 1);
    const std::uint64_t len = rng.below(s.size() - pos + 1);
    CHECK(w.subword(pos, len).str() == s.substr(pos, len));
  }
  CHECK(w.prefix(0).empty());
  CHECK(w.prefix(65).str() == s.substr(0, 65));
  CHECK(w.suffix(65).str() == s.substr(s.size() - 65));
  CHECK_THROWS_AS(w.subword(0, 301), ConfigError);
  CHECK_THROWS_AS(w.subword(301, 0), ConfigError);
  CHECK_THROWS_AS(w.subword(200, 150), ConfigError);
}

TEST_CASE("reversed and palindrome detection") {
  DetRng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    std::string s = random_binary(rng, rng.below(200));
    const Word w = Word::from_string(s);
    std::string r = s;
    std::reverse(r.begin(), r.end());
    CHECK(w.reversed().str() == r);
    CHECK(w.is_palindrome() == (s == r));
  }
  CHECK(Word::from_string("0110").is_palindrome());
  CHECK(Word::from_string("010").is_palindrome());
  CHECK_FALSE(Word::from_string("011").is_palindrome());
  CHECK(Word().is_palindrome());
}

TEST_CASE("counts, prefixes, suffixes") {
  DetRng rng(15);
  for (int trial = 0; trial < 40; ++trial) {
    const std::string s = random_binary(rng, rng.below(200));
    const Word w = Word::from_string(s);
    CHECK(w.count_ones() ==
          static_cast<std::uint64_t>(std::count(s.begin(), s.end(), '1')));
    CHECK(w.count_zeros() + w.count_ones() == w.size());
    if (!s.empty()) {
      const std::uint64_t cut = rng.below(s.size() + 1);
      CHECK(w.prefix(cut).is_prefix_of(w));
      CHECK(w.suffix(cut).is_suffix_of(w));
    }
  }
  CHECK(Word().is_prefix_of(Word::from_string("01")));
  CHECK(Word().is_suffix_of(Word()));
  CHECK_FALSE(Word::from_string("10").is_prefix_of(Word::from_string("01")));
  CHECK_FALSE(Word::from_string("110").is_prefix_of(Word::from_string("11")));
}

TEST_CASE("find matches string_view search, including offsets") {
  DetRng rng(16);
  const std::string hay = random_binary(rng, 400);
  const Word w = Word::from_string(hay);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t len = 1 + rng.below(12);
    std::string needle;
    if (rng.below(2) && len <= hay.size()) {
      const std::uint64_t pos = rng.below(hay.size() - len + 1);
      needle = hay.substr(pos, len);  // guaranteed hit
    } else {
      needle = random_binary(rng, len);
    }
    const std::uint64_t from = rng.below(hay.size() + 2);
    const auto expect = hay.find(needle, from);
    const auto got = w.find(Word::from_string(needle), from);
    if (expect == std::string::npos) {
      CHECK(got == Word::npos);
    } else {
      CHECK(got == expect);
    }
  }
  CHECK(w.find(Word()) == 0);  // empty needle matches at the start
  CHECK(w.contains(Word::from_string(hay.substr(100, 50))));
}

TEST_CASE("filled and ordering") {
  CHECK(Word::filled(5, 1).str() == "11111");
  CHECK(Word::filled(3, 0).str() == "000");
  CHECK(Word::filled(0, 1).empty());

  const Word a = Word::from_string("01");
  const Word b = Word::from_string("011");
  CHECK(a == Word::from_string("01"));
  CHECK(a != b);
  CHECK((a <=> b) == std::strong_ordering::less);  // shorter first
  CHECK((a <=> a) == std::strong_ordering::equal);
}
