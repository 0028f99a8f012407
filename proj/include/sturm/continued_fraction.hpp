#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "sturm/errors.hpp"

namespace sturm {

// Continued-fraction expansion [a_1, a_2, ...] of an irrational alpha in (0,1),
// truncated at a stored depth D. All coefficients are >= 1.
class ContinuedFraction {
 public:
  static constexpr int default_depth = 64;
  static constexpr int max_depth = 4096;

  explicit ContinuedFraction(std::vector<std::int64_t> coeffs);

  static ContinuedFraction fibonacci(int depth = default_depth);  // [1,1,1,...]
  static ContinuedFraction silver(int depth = default_depth);     // [2,2,2,...]
  // Repeats `pattern` cyclically out to `depth` coefficients.
  static ContinuedFraction periodic(const std::vector<std::int64_t>& pattern,
                                    int depth = default_depth);

  int depth() const { return static_cast<int>(a_.size()); }
  // 1-based: coeff(1) = a_1.
  std::int64_t coeff(int k) const;
  const std::vector<std::int64_t>& coeffs() const { return a_; }

  bool operator==(const ContinuedFraction&) const = default;

 private:
  std::vector<std::int64_t> a_;
};

// Convergents p_k/q_k with p_0 = 0, p_{-1} = 1, q_0 = 1, q_{-1} = 0 and
// p_k = a_k p_{k-1} + p_{k-2} (same recursion for q).
class ConvergentTable {
 public:
  explicit ConvergentTable(const ContinuedFraction& cf);

  // k ranges over [-1, depth].
  const mpz_class& p(int k) const { return p_.at(static_cast<std::size_t>(k + 1)); }
  const mpz_class& q(int k) const { return q_.at(static_cast<std::size_t>(k + 1)); }
  mpq_class value(int k) const;  // p_k/q_k, k >= 1
  int depth() const { return static_cast<int>(p_.size()) - 2; }

  // Open interval with endpoints value(k-1), value(k) that contains every
  // continuation of the expansion past depth k (k >= 2).
  void bracket(int k, mpq_class& lo, mpq_class& hi) const;

 private:
  std::vector<mpz_class> p_, q_;
};

// Exact value of the depth-n convergent, n in [1, depth].
mpq_class convergent_value(const ContinuedFraction& cf, int n);

// Running means (a_1 + ... + a_j)/j for j = 1..D.
std::vector<double> bounded_density_profile(const ContinuedFraction& cf);

// Exact lengths of the canonical word family: |s_{-1}| = |s_0| = 1,
// |s_1| = a_1, |s_n| = a_n |s_{n-1}| + |s_{n-2}|.
class LengthTable {
 public:
  LengthTable(const ContinuedFraction& cf, int max_level);

  const mpz_class& of(int n) const;  // n in [-1, max_level]
  int max_level() const { return static_cast<int>(len_.size()) - 2; }
  // Smallest n >= floor_level with of(n) >= bound; -1 if none at this depth.
  int first_level_with_length_at_least(const mpz_class& bound, int floor_level = -1) const;

 private:
  std::vector<mpz_class> len_;
};

// Expansion of an exactly-known interval (lo, hi) (or a point when lo == hi)
// by the interval Gauss map. Stops with PrecisionError if the interval cannot
// decide the next coefficient, or if the value is rational and terminates,
// before reaching `depth` coefficients.
ContinuedFraction expand_interval(mpq_class lo, mpq_class hi, int depth);

// Point expansion of an exact rational; terminating expansions raise
// PrecisionError because the target is an irrational in (0,1).
ContinuedFraction expand_exact(const mpq_class& x, int depth);

// Parses "0.6180339887" (taken as the printed value +- half an ulp of the last
// digit) or "q:num/den" / plain "num/den" (taken as exact) and expands.
ContinuedFraction expand_numeric(const std::string& text, int depth);

// Exact rational from a decimal/fraction literal; used for phase offsets.
mpq_class parse_rational(const std::string& text);

}  // namespace sturm
