#pragma once

#include <cstdint>
#include <vector>

#include "sturm/sturmian.hpp"
#include "sturm/word.hpp"

namespace sturm {

// Block tag within a level-n partition: cur = s_n, prev = s_{n-1}.
enum class BlockTag : std::uint8_t { prev = 0, cur = 1 };

// Closed 1-based position interval of one block, relative to the partitioned
// word: block j covers positions start..end.
struct BlockSpan {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  bool operator==(const BlockSpan&) const = default;
};

// A level-n block partition w = a z_1 ... z_l b: every z_j is s_n or s_{n-1};
// a is a (possibly empty) proper suffix of a block, b a proper prefix.
struct Partition {
  int level = 0;
  Word head;  // a
  Word tail;  // b
  std::vector<BlockTag> blocks;
  std::vector<BlockSpan> spans;  // one per block, 1-based within the word
};

// 1-based position of the first occurrence of w in the infinite word c.
struct Locator {
  std::uint64_t j = 0;
};

Locator locate(const Word& w, const ContinuedFraction& cf,
               std::uint64_t budget = default_letter_budget);
bool is_factor(const Word& w, const ContinuedFraction& cf,
               std::uint64_t budget = default_letter_budget);

// The level-n partition of the length-`length` prefix of c: head is empty and
// the final block is truncated into the tail when `length` cuts it short.
Partition partition_c_prefix(const ContinuedFraction& cf, int level, std::uint64_t length,
                             std::uint64_t budget = default_letter_budget);

// Restriction of c's level-n partition to the first occurrence of w. Raises
// LevelError when w lies inside a single block (partition too coarse) and
// MembershipError when w is not a factor.
Partition standard_partition(const Word& w, const ContinuedFraction& cf, int level,
                             std::uint64_t budget = default_letter_budget);

// Reassembles the word a partition describes; used for validation.
Word assemble(const Partition& p, const ContinuedFraction& cf,
              std::uint64_t budget = default_letter_budget);
// Checks spans/lengths/fragment predicates; raises InternalError on violation.
void validate(const Partition& p, const Word& w, const ContinuedFraction& cf,
              std::uint64_t budget = default_letter_budget);

// w = x y with x a suffix of s_t or s_{t-1} and y a prefix of s_{t+1}, where
// t+1 is the lowest level whose word contains w -- bumped one level up in the
// single corner where that level admits no cut (a_1 = 1 families, short words
// ending in 0). Among valid cuts the one with the shortest x is returned; the
// level-1 corner cases keep the whole word on the side the containment
// argument dictates.
struct TwoBlockSplit {
  int level = 0;  // t
  Word left;      // x
  Word right;     // y
};
TwoBlockSplit two_block_decomposition(const Word& w, const ContinuedFraction& cf,
                                      std::uint64_t budget = default_letter_budget);

// Smallest n >= 2 with |w| < |s_n|, plus the 1-based offset of w's first
// occurrence inside s_{n+2} (every factor that short occurs there).
struct Embedding {
  int level = 0;         // n
  std::uint64_t offset;  // 1-based within s_{n+2}
};
Embedding embed_in_sn(const Word& w, const ContinuedFraction& cf,
                      std::uint64_t budget = default_letter_budget);

// For w a factor of s_n (n >= 1): x w y = s_{n+3} with |x|, |y| >= |s_{n+1}|,
// taking the leftmost occurrence with both margins.
struct Frame {
  Word left;   // x
  Word right;  // y
};
Frame frame(const Word& w, const ContinuedFraction& cf, int level,
            std::uint64_t budget = default_letter_budget);

// Tag sequence of c's level-n partition, long enough to cover `length`
// letters; tags come in the canonical block order z_1 z_2 ...
std::vector<BlockTag> c_partition_tags(const ContinuedFraction& cf, int level,
                                       const mpz_class& length);

}  // namespace sturm
