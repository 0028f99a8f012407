#pragma once

#include <cstdint>
#include <set>

#include "sturm/continued_fraction.hpp"
#include "sturm/word.hpp"

namespace sturm {

// Cap on letters materialized by any single construction; requests beyond it
// raise ResourceError rather than exhausting memory.
inline constexpr std::uint64_t default_letter_budget = std::uint64_t{1} << 25;

// Canonical word family: s_{-1} = 1, s_0 = 0, s_1 = 0^{a_1 - 1} 1,
// s_n = s_{n-1}^{a_n} s_{n-2} for n >= 2.
Word build_sn(const ContinuedFraction& cf, int n,
              std::uint64_t budget = default_letter_budget);

// Prefix of the infinite word c = lim s_n of the requested length, built
// without materializing a full s_n (lengths can overshoot the prefix).
Word c_prefix(const ContinuedFraction& cf, std::uint64_t length,
              std::uint64_t budget = default_letter_budget);

// Memoizing builder for repeated s_n access within one computation.
class SnCache {
 public:
  explicit SnCache(const ContinuedFraction& cf, std::uint64_t budget = default_letter_budget)
      : cf_(&cf), budget_(budget) {}
  const Word& at(int n);
  const ContinuedFraction& cf() const { return *cf_; }
  std::uint64_t budget() const { return budget_; }

 private:
  const ContinuedFraction* cf_;
  std::uint64_t budget_;
  std::vector<Word> memo_;  // memo_[n + 1] holds s_n once built
};

// Mechanical rotation word v(n) = chi_{[1-alpha,1)}(n alpha + theta mod 1),
// classified exactly: alpha is pinned strictly between two consecutive
// convergents deep enough that floor(n alpha + theta) is the same at both
// endpoints. Raises PrecisionError naming n when the stored depth cannot
// separate a boundary hit.
struct RotationParams {
  ContinuedFraction cf;
  mpq_class theta;  // in [0, 1)
  double lambda = 0;
};

Word rotation_word(const RotationParams& params, std::int64_t from, std::int64_t to,
                   std::uint64_t budget = default_letter_budget);
int rotation_letter(const ContinuedFraction& cf, const mpq_class& theta, std::int64_t n);

// s_n = pi_n * tail with tail = "10" (n even) or "01" (n odd), valid for n >= 2;
// pi_n is a palindrome.
struct PalindromeFactor {
  Word palindrome;
  Word tail;
};
PalindromeFactor palindrome_factor(const ContinuedFraction& cf, int n,
                                   std::uint64_t budget = default_letter_budget);

// All length-ell factors of c, collected from a window guaranteed to contain
// every factor of that length (count is exactly ell + 1).
std::set<Word> subwords(const ContinuedFraction& cf, std::uint64_t ell,
                        std::uint64_t budget = default_letter_budget);

// Scan level for factor searches: the smallest n >= 2 with |s_n| > ell; every
// factor of length <= ell occurs in s_{n+2}. Raises ConfigError when the
// stored depth is insufficient.
int factor_scan_level(const ContinuedFraction& cf, const mpz_class& ell);

}  // namespace sturm
