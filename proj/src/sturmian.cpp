#include "sturm/sturmian.hpp"

#include <algorithm>
#include <string>

namespace sturm {

namespace {

void check_level(const ContinuedFraction& cf, int n) {
  if (n < -1) throw ConfigError("word level must be >= -1");
  if (n > cf.depth()) {
    throw ConfigError("word level " + std::to_string(n) + " needs coefficient a_" +
                      std::to_string(n) + " beyond stored depth " + std::to_string(cf.depth()));
  }
}

void check_budget(const mpz_class& letters, std::uint64_t budget, const std::string& what) {
  if (letters > budget) {
    throw ResourceError(what + " needs " + letters.get_str() + " letters, over the budget of " +
                        std::to_string(budget));
  }
}

}  // namespace

Word build_sn(const ContinuedFraction& cf, int n, std::uint64_t budget) {
  check_level(cf, n);
  LengthTable lengths(cf, std::max(n, 1));
  check_budget(lengths.of(std::max(n, -1)), budget, "s_" + std::to_string(n));
  Word prev = Word::from_string("1");  // s_{-1}
  Word cur = Word::from_string("0");   // s_0
  if (n == -1) return prev;
  if (n == 0) return cur;
  {
    Word s1;
    s1.append_copies(cur, static_cast<std::uint64_t>(cf.coeff(1)) - 1);
    s1.push_back(1);
    prev = std::move(cur);
    cur = std::move(s1);
  }
  for (int m = 2; m <= n; ++m) {
    Word next;
    next.reserve_letters(lengths.of(m).get_ui());
    next.append_copies(cur, static_cast<std::uint64_t>(cf.coeff(m)));
    next.append(prev);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

const Word& SnCache::at(int n) {
  check_level(*cf_, n);
  const std::size_t idx = static_cast<std::size_t>(n + 1);
  if (memo_.size() <= idx) memo_.resize(idx + 1);
  if (memo_[idx].empty()) memo_[idx] = build_sn(*cf_, n, budget_);
  return memo_[idx];
}

namespace {

// Appends the length-`len` prefix of s_n to `out`; len <= |s_n| is assumed.
void append_sn_prefix(const ContinuedFraction& cf, const LengthTable& lengths, int n,
                      mpz_class len, Word& out) {
  while (len > 0) {
    if (lengths.of(n) <= len) {
      // Whole word fits; bail out to the iterative builder.
      Word whole = build_sn(cf, n, ~std::uint64_t{0});
      if (lengths.of(n) < len) throw InternalError("prefix longer than source word");
      out.append(whole);
      return;
    }
    if (n <= 0) throw InternalError("letter-level prefix underflow");
    if (n == 1) {
      // s_1 = 0^{a_1-1} 1 and len < |s_1|, so the prefix is all zeros.
      out.append(Word::filled(len.get_ui(), 0));
      return;
    }
    // s_n = s_{n-1}^{a_n} s_{n-2}: peel whole copies of s_{n-1}, then recurse
    // into whichever word the residual prefix lands in.
    mpz_class copies = len / lengths.of(n - 1);
    if (copies > cf.coeff(n)) copies = cf.coeff(n);
    if (copies > 0) {
      Word block = build_sn(cf, n - 1, ~std::uint64_t{0});
      out.append_copies(block, copies.get_ui());
      len -= copies * lengths.of(n - 1);
    }
    if (len == 0) return;
    n = (copies == cf.coeff(n)) ? n - 2 : n - 1;
  }
}

}  // namespace

Word c_prefix(const ContinuedFraction& cf, std::uint64_t length, std::uint64_t budget) {
  if (length == 0) return Word();
  check_budget(mpz_class(length), budget, "prefix of length " + std::to_string(length));
  LengthTable lengths(cf, cf.depth());
  // Smallest n >= 1 whose word covers the prefix; s_0 is not a prefix of c,
  // every s_n with n >= 1 is.
  const int n = lengths.first_level_with_length_at_least(mpz_class(length), 1);
  if (n < 0) {
    throw ConfigError("prefix length " + std::to_string(length) +
                      " exceeds |s_D| at stored depth " + std::to_string(cf.depth()));
  }
  Word out;
  out.reserve_letters(length);
  append_sn_prefix(cf, lengths, n, mpz_class(length), out);
  if (out.size() != length) throw InternalError("prefix construction length mismatch");
  return out;
}

namespace {

// floor(m * alpha + theta) decided by bracketing alpha strictly between
// consecutive convergents; -1 encodes "undecided at this depth".
bool floor_at_depth(const ConvergentTable& conv, const mpq_class& theta, std::int64_t m, int k,
                    mpz_class& out) {
  mpq_class lo, hi;
  conv.bracket(k, lo, hi);
  mpq_class vlo = m * lo + theta;
  mpq_class vhi = m * hi + theta;
  if (vlo > vhi) std::swap(vlo, vhi);
  mpz_class flo, fhi;
  mpz_fdiv_q(flo.get_mpz_t(), vlo.get_num().get_mpz_t(), vlo.get_den().get_mpz_t());
  mpz_fdiv_q(fhi.get_mpz_t(), vhi.get_num().get_mpz_t(), vhi.get_den().get_mpz_t());
  // alpha lies strictly inside the bracket, but theta shifts are exact, so an
  // endpoint landing exactly on an integer still leaves the open image on one
  // side: floor(vhi) = vhi exactly means interior values take floor(vhi) - 1.
  if (fhi > flo && vhi == fhi) fhi -= 1;
  if (flo != fhi) return false;
  out = flo;
  return true;
}

}  // namespace

int rotation_letter(const ContinuedFraction& cf, const mpq_class& theta, std::int64_t n) {
  if (theta < 0 || theta >= 1) throw ConfigError("phase offset theta must lie in [0, 1)");
  ConvergentTable conv(cf);
  // v(n) = floor((n+1) alpha + theta) - floor(n alpha + theta); floor(theta)=0.
  mpz_class g[2];
  for (int which = 0; which < 2; ++which) {
    const std::int64_t m = n + which;
    if (m == 0) {
      g[which] = 0;
      continue;
    }
    bool decided = false;
    for (int k = 2; k <= conv.depth(); ++k) {
      if (floor_at_depth(conv, theta, m, k, g[which])) {
        decided = true;
        break;
      }
    }
    if (!decided) {
      throw PrecisionError("rotation letter at n = " + std::to_string(n) +
                           " is boundary-ambiguous at stored depth " +
                           std::to_string(cf.depth()) +
                           ": n*alpha + theta is too close to an integer");
    }
  }
  mpz_class diff = g[1] - g[0];
  if (diff < 0 || diff > 1) throw InternalError("rotation letter outside {0,1}");
  return static_cast<int>(diff.get_si());
}

Word rotation_word(const RotationParams& params, std::int64_t from, std::int64_t to,
                   std::uint64_t budget) {
  if (from > to) throw ConfigError("rotation range start exceeds end");
  const mpz_class count = mpz_class(to) - mpz_class(from) + 1;
  check_budget(count, budget, "rotation word over " + count.get_str() + " sites");
  if (params.theta < 0 || params.theta >= 1) {
    throw ConfigError("phase offset theta must lie in [0, 1)");
  }
  ConvergentTable conv(params.cf);
  Word out;
  out.reserve_letters(count.get_ui());
  // Successive floors: evaluate G(m) = floor(m alpha + theta) once per site.
  mpz_class g_prev, g_cur;
  bool have_prev = false;
  for (std::int64_t m = from; m <= to + 1; ++m) {
    if (m == 0) {
      g_cur = 0;
    } else {
      bool decided = false;
      // Start at a depth whose denominator already exceeds |m| (below that the
      // bracket is wider than one lattice step), then escalate.
      int k = 2;
      const mpz_class target = mpz_class(m < 0 ? -m : m) + 2;
      while (k < conv.depth() && conv.q(k) < target) ++k;
      for (; k <= conv.depth(); ++k) {
        if (floor_at_depth(conv, params.theta, m, k, g_cur)) {
          decided = true;
          break;
        }
      }
      if (!decided) {
        throw PrecisionError("rotation letter at n = " + std::to_string(m - 1) +
                             " is boundary-ambiguous at stored depth " +
                             std::to_string(params.cf.depth()) +
                             ": n*alpha + theta is too close to an integer");
      }
    }
    if (have_prev) {
      mpz_class diff = g_cur - g_prev;
      if (diff < 0 || diff > 1) throw InternalError("rotation letter outside {0,1}");
      out.push_back(static_cast<int>(diff.get_si()));
    }
    g_prev = g_cur;
    have_prev = true;
  }
  if (out.size() != count) throw InternalError("rotation word length mismatch");
  return out;
}

PalindromeFactor palindrome_factor(const ContinuedFraction& cf, int n, std::uint64_t budget) {
  if (n < 2) throw ConfigError("palindrome factorization needs level n >= 2");
  Word sn = build_sn(cf, n, budget);
  PalindromeFactor out;
  out.palindrome = sn.prefix(sn.size() - 2);
  out.tail = sn.suffix(2);
  const Word expect = Word::from_string(n % 2 == 0 ? "10" : "01");
  if (out.tail != expect) throw InternalError("palindrome tail mismatch at level " +
                                              std::to_string(n));
  return out;
}

int factor_scan_level(const ContinuedFraction& cf, const mpz_class& ell) {
  LengthTable lengths(cf, cf.depth());
  int n = lengths.first_level_with_length_at_least(ell + 1, 2);
  if (n < 0 || n + 2 > cf.depth()) {
    throw ConfigError("factor search at length " + ell.get_str() +
                      " needs levels beyond stored depth " + std::to_string(cf.depth()));
  }
  return n;
}

std::set<Word> subwords(const ContinuedFraction& cf, std::uint64_t ell, std::uint64_t budget) {
  if (ell == 0) throw ConfigError("factor length must be >= 1");
  const int n = factor_scan_level(cf, mpz_class(ell));
  const Word window = build_sn(cf, n + 2, budget);
  std::set<Word> out;
  for (std::uint64_t pos = 0; pos + ell <= window.size(); ++pos) {
    out.insert(window.subword(pos, ell));
  }
  return out;
}

}  // namespace sturm
