#include "sturm/partition.hpp"

#include <algorithm>
#include <string>

namespace sturm {

namespace {

constexpr std::uint64_t block_count_budget = std::uint64_t{1} << 26;

void check_partition_level(const ContinuedFraction& cf, int level) {
  if (level < 0) throw ConfigError("partition level must be >= 0");
  if (level > cf.depth()) {
    throw ConfigError("partition level " + std::to_string(level) + " exceeds stored depth " +
                      std::to_string(cf.depth()));
  }
}

// Exact lengths of the two block types at a given level.
struct BlockLengths {
  mpz_class cur, prev;
  const mpz_class& of(BlockTag t) const { return t == BlockTag::cur ? cur : prev; }
};

BlockLengths block_lengths(const ContinuedFraction& cf, int level) {
  LengthTable lengths(cf, std::max(level, 1));
  return {lengths.of(level), lengths.of(level - 1)};
}

}  // namespace

std::vector<BlockTag> c_partition_tags(const ContinuedFraction& cf, int level,
                                       const mpz_class& length) {
  check_partition_level(cf, level);
  if (length < 1) throw ConfigError("partition cover length must be >= 1");
  const BlockLengths bl = block_lengths(cf, level);
  std::vector<BlockTag> prev = {BlockTag::prev};  // block sequence of s_{level-1}
  std::vector<BlockTag> cur = {BlockTag::cur};    // block sequence of s_level
  mpz_class len_prev = bl.prev, len_cur = bl.cur;
  int m = level + 1;
  while (len_cur < length) {
    if (m > cf.depth()) {
      throw ConfigError("covering " + length.get_str() + " letters at partition level " +
                        std::to_string(level) + " needs coefficients beyond stored depth " +
                        std::to_string(cf.depth()));
    }
    // s_m = s_{m-1}^{a_m} s_{m-2}, with the m = 1 exception (a_1 - 1 copies).
    const std::int64_t copies = (m == 1) ? cf.coeff(1) - 1 : cf.coeff(m);
    mpz_class new_len = copies * len_cur + len_prev;
    const mpz_class blocks_needed = mpz_class(cur.size()) * copies + prev.size();
    if (blocks_needed > block_count_budget) {
      throw ResourceError("partition tag sequence exceeds block budget");
    }
    std::vector<BlockTag> next;
    next.reserve(blocks_needed.get_ui());
    for (std::int64_t i = 0; i < copies; ++i) next.insert(next.end(), cur.begin(), cur.end());
    next.insert(next.end(), prev.begin(), prev.end());
    prev = std::move(cur);
    cur = std::move(next);
    len_prev = len_cur;
    len_cur = new_len;
    ++m;
  }
  // Trim to the first block that reaches `length`.
  mpz_class covered = 0;
  std::size_t used = 0;
  while (used < cur.size() && covered < length) {
    covered += bl.of(cur[used]);
    ++used;
  }
  cur.resize(used);
  return cur;
}

Locator locate(const Word& w, const ContinuedFraction& cf, std::uint64_t budget) {
  if (w.empty()) throw ConfigError("cannot locate the empty word");
  const int n = factor_scan_level(cf, mpz_class(w.size()));
  const Word window = build_sn(cf, n + 2, budget);
  const std::uint64_t pos = window.find(w);
  if (pos == Word::npos) {
    throw MembershipError("word of length " + std::to_string(w.size()) +
                          " is not a factor of the infinite word");
  }
  return Locator{pos + 1};
}

bool is_factor(const Word& w, const ContinuedFraction& cf, std::uint64_t budget) {
  if (w.empty()) return true;
  const int n = factor_scan_level(cf, mpz_class(w.size()));
  return build_sn(cf, n + 2, budget).contains(w);
}

namespace {

// Shared core: the level-n partition of c restricted to 1-based positions
// [from, to]. Head/tail fragments are cut from the blocks straddling the ends.
Partition restrict_partition(const ContinuedFraction& cf, int level, std::uint64_t from,
                             std::uint64_t to, bool forbid_single_block,
                             std::uint64_t budget) {
  const BlockLengths bl = block_lengths(cf, level);
  const std::vector<BlockTag> tags = c_partition_tags(cf, level, mpz_class(to));
  SnCache cache(cf, budget);

  Partition out;
  out.level = level;

  mpz_class pos = 0;  // letters consumed before the current block
  for (const BlockTag tag : tags) {
    const mpz_class& blen = bl.of(tag);
    const mpz_class bstart = pos + 1, bend = pos + blen;
    pos = bend;
    if (bend < from) continue;
    if (bstart > to) break;
    if (forbid_single_block && bstart <= from && to <= bend) {
      // The whole word sits in this one block (possibly equal to it).
      throw LevelError("partition level " + std::to_string(level) +
                       " is too coarse: the word lies inside a single block");
    }
    const bool cut_left = bstart < from;
    const bool cut_right = bend > to;
    const Word& block = cache.at(tag == BlockTag::cur ? level : level - 1);
    if (cut_left && cut_right) {
      // Only reachable for prefix restrictions shorter than the first block.
      const mpz_class skip = mpz_class(from) - bstart;
      out.tail = block.subword(skip.get_ui(), static_cast<std::uint64_t>(to - from + 1));
      return out;
    }
    if (cut_left) {
      // Fragment from `from` to the block's end: a suffix of the block.
      const mpz_class keep = bend - from + 1;
      out.head = block.suffix(keep.get_ui());
      continue;
    }
    if (cut_right) {
      const mpz_class keep = mpz_class(to) - bstart + 1;
      out.tail = block.prefix(keep.get_ui());
      break;
    }
    out.blocks.push_back(tag);
    const mpz_class rel = bstart - from + 1;
    const std::uint64_t rel_start = rel.get_ui();
    out.spans.push_back({rel_start, rel_start + blen.get_ui() - 1});
  }
  return out;
}

}  // namespace

Partition partition_c_prefix(const ContinuedFraction& cf, int level, std::uint64_t length,
                             std::uint64_t budget) {
  check_partition_level(cf, level);
  if (length == 0) throw ConfigError("prefix length must be >= 1");
  if (mpz_class(length) > budget) {
    throw ResourceError("prefix partition over " + std::to_string(length) +
                        " letters exceeds the budget");
  }
  return restrict_partition(cf, level, 1, length, false, budget);
}

Partition standard_partition(const Word& w, const ContinuedFraction& cf, int level,
                             std::uint64_t budget) {
  check_partition_level(cf, level);
  const Locator loc = locate(w, cf, budget);
  return restrict_partition(cf, level, loc.j, loc.j + w.size() - 1, true, budget);
}

Word assemble(const Partition& p, const ContinuedFraction& cf, std::uint64_t budget) {
  SnCache cache(cf, budget);
  Word out = p.head;
  mpz_class total = p.head.size();
  for (const BlockTag tag : p.blocks) {
    const Word& block = cache.at(tag == BlockTag::cur ? p.level : p.level - 1);
    total += block.size();
    if (total > budget) throw ResourceError("assembled partition exceeds the letter budget");
    out.append(block);
  }
  out.append(p.tail);
  return out;
}

void validate(const Partition& p, const Word& w, const ContinuedFraction& cf,
              std::uint64_t budget) {
  if (assemble(p, cf, budget) != w) throw InternalError("partition does not reassemble its word");
  SnCache cache(cf, budget);
  const Word& cur = cache.at(p.level);
  const Word& prev = cache.at(p.level - 1);
  if (!p.head.empty()) {
    const bool ok = (p.head.size() < cur.size() && p.head.is_suffix_of(cur)) ||
                    (p.head.size() < prev.size() && p.head.is_suffix_of(prev));
    if (!ok) throw InternalError("partition head is not a proper block suffix");
  }
  if (!p.tail.empty()) {
    const bool ok = (p.tail.size() < cur.size() && p.tail.is_prefix_of(cur)) ||
                    (p.tail.size() < prev.size() && p.tail.is_prefix_of(prev));
    if (!ok) throw InternalError("partition tail is not a proper block prefix");
  }
  if (p.blocks.size() != p.spans.size()) throw InternalError("span/tag count mismatch");
  std::uint64_t cursor = p.head.size();
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    const Word& block = p.blocks[i] == BlockTag::cur ? cur : prev;
    if (p.spans[i].start != cursor + 1 || p.spans[i].end != cursor + block.size()) {
      throw InternalError("block span does not match cumulative block lengths");
    }
    cursor = p.spans[i].end;
  }
  if (cursor + p.tail.size() != w.size()) throw InternalError("partition length mismatch");
}

namespace {

// Z-array of s: z[i] = length of the longest common prefix of s and s[i:].
std::vector<std::uint64_t> z_function(const std::string& s) {
  const std::uint64_t n = s.size();
  std::vector<std::uint64_t> z(n, 0);
  if (n == 0) return z;
  z[0] = n;
  std::uint64_t l = 0, r = 0;
  for (std::uint64_t i = 1; i < n; ++i) {
    if (i < r) z[i] = std::min(r - i, z[i - l]);
    while (i + z[i] < n && s[z[i]] == s[i + z[i]]) ++z[i];
    if (i + z[i] > r) {
      l = i;
      r = i + z[i];
    }
  }
  return z;
}

// For each k in [0, |w|]: can w[0..k) end s (i.e. be a suffix of s)?
std::vector<char> prefix_is_suffix_table(const std::string& w, const std::string& s) {
  std::string rs(s.rbegin(), s.rend());
  std::string rw(w.rbegin(), w.rend());
  const std::vector<std::uint64_t> z = z_function(rs + '\x01' + rw);
  std::vector<char> ok(w.size() + 1, 0);
  ok[0] = 1;
  for (std::uint64_t k = 1; k <= w.size(); ++k) {
    // w[0..k) suffix of s <=> reverse(w)[|w|-k..) begins like reverse(s).
    if (k > s.size()) break;
    ok[k] = z[rs.size() + 1 + (w.size() - k)] >= k;
  }
  return ok;
}

}  // namespace

TwoBlockSplit two_block_decomposition(const Word& w, const ContinuedFraction& cf,
                                      std::uint64_t budget) {
  if (w.empty()) throw ConfigError("cannot decompose the empty word");
  if (!is_factor(w, cf, budget)) {
    throw MembershipError("word of length " + std::to_string(w.size()) +
                          " is not a factor of the infinite word");
  }
  const std::uint64_t a1 = static_cast<std::uint64_t>(cf.coeff(1));
  const std::uint64_t ones = w.count_ones();
  // Factors of s_1 = 0^{a_1-1} 1: runs of zeros, optionally closed by the 1.
  if (ones == 0 && w.size() <= a1 - 1) {
    return {0, Word(), w};  // w is a prefix of s_1
  }
  if (ones == 1 && w.letter(w.size() - 1) == 1 && w.size() - 1 <= a1 - 1) {
    return {1, w, Word()};  // w is a suffix of s_1
  }
  // Lowest level containing w; at least 2 since w is not a factor of s_1.
  SnCache cache(cf, budget);
  LengthTable lengths(cf, cf.depth());
  int m = 2;
  while (true) {
    if (m > cf.depth()) {
      throw ConfigError("two-block decomposition needs levels beyond stored depth " +
                        std::to_string(cf.depth()));
    }
    if (lengths.of(m) >= w.size() && cache.at(m).contains(w)) break;
    ++m;
  }
  // Cut at level m-1 when possible. That level can be cut-less only when
  // m = 2 with a_1 = 1 (s_0 = "0" does not begin s_2 there); then w is a
  // suffix of s_2 and the cut exists one level up, so try t = m as well.
  const std::string ws = w.str();
  for (int t = m - 1; t <= m; ++t) {
    // y = w[k..) must be a prefix of s_{t+1}.
    const std::string top = cache.at(t + 1).str();
    const std::vector<std::uint64_t> zy = z_function(top + '\x01' + ws);
    const std::vector<char> x_in_cur = prefix_is_suffix_table(ws, cache.at(t).str());
    const std::vector<char> x_in_prev = prefix_is_suffix_table(ws, cache.at(t - 1).str());
    for (std::uint64_t k = 0; k <= w.size(); ++k) {
      const bool x_ok = (k == 0) || x_in_cur[k] || x_in_prev[k];
      if (!x_ok) continue;
      const bool y_ok =
          (k == w.size()) || zy[top.size() + 1 + k] >= w.size() - k;
      if (!y_ok) continue;
      return {t, w.prefix(k), w.subword(k, w.size() - k)};
    }
  }
  throw InternalError("no two-block cut found for a confirmed factor");
}

Embedding embed_in_sn(const Word& w, const ContinuedFraction& cf, std::uint64_t budget) {
  if (w.empty()) throw ConfigError("cannot embed the empty word");
  LengthTable lengths(cf, cf.depth());
  const int n = lengths.first_level_with_length_at_least(mpz_class(w.size()) + 1, 2);
  if (n < 0 || n + 2 > cf.depth()) {
    throw ConfigError("embedding a word of length " + std::to_string(w.size()) +
                      " needs levels beyond stored depth " + std::to_string(cf.depth()));
  }
  const Word window = build_sn(cf, n + 2, budget);
  const std::uint64_t pos = window.find(w);
  if (pos == Word::npos) {
    throw MembershipError("word of length " + std::to_string(w.size()) +
                          " is not a factor of the infinite word");
  }
  return {n, pos + 1};
}

Frame frame(const Word& w, const ContinuedFraction& cf, int level, std::uint64_t budget) {
  if (w.empty()) throw ConfigError("cannot frame the empty word");
  if (level < 1) throw ConfigError("framing needs level >= 1");
  if (level + 3 > cf.depth()) {
    throw ConfigError("framing at level " + std::to_string(level) +
                      " needs coefficients beyond stored depth " + std::to_string(cf.depth()));
  }
  SnCache cache(cf, budget);
  if (!cache.at(level).contains(w)) {
    throw ConfigError("frame precondition failed: the word is not a factor of s_" +
                      std::to_string(level));
  }
  const Word& host = cache.at(level + 3);
  const std::uint64_t margin = cache.at(level + 1).size();
  std::uint64_t pos = host.find(w, margin);
  while (pos != Word::npos) {
    if (host.size() - (pos + w.size()) >= margin) {
      return {host.prefix(pos), host.suffix(host.size() - pos - w.size())};
    }
    pos = host.find(w, pos + 1);
  }
  throw InternalError("no framed occurrence with the guaranteed margins");
}

}  // namespace sturm
