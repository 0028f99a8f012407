#include "sturm/continued_fraction.hpp"

#include <algorithm>
#include <sstream>

namespace sturm {

ContinuedFraction::ContinuedFraction(std::vector<std::int64_t> coeffs) : a_(std::move(coeffs)) {
  if (a_.empty()) throw ConfigError("continued fraction needs at least one coefficient");
  if (a_.size() > static_cast<std::size_t>(max_depth)) {
    throw ConfigError("continued fraction depth exceeds hard limit " + std::to_string(max_depth));
  }
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i] < 1) {
      throw ConfigError("continued fraction coefficient a_" + std::to_string(i + 1) +
                        " must be >= 1, got " + std::to_string(a_[i]));
    }
  }
}

std::int64_t ContinuedFraction::coeff(int k) const {
  if (k < 1 || k > depth()) {
    throw ConfigError("coefficient index " + std::to_string(k) + " outside stored depth " +
                      std::to_string(depth()));
  }
  return a_[static_cast<std::size_t>(k - 1)];
}

ContinuedFraction ContinuedFraction::fibonacci(int depth) {
  return periodic({1}, depth);
}

ContinuedFraction ContinuedFraction::silver(int depth) {
  return periodic({2}, depth);
}

ContinuedFraction ContinuedFraction::periodic(const std::vector<std::int64_t>& pattern, int depth) {
  if (pattern.empty()) throw ConfigError("periodic pattern must be nonempty");
  if (depth < 1) throw ConfigError("depth must be >= 1");
  std::vector<std::int64_t> a(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) a[static_cast<std::size_t>(i)] = pattern[i % pattern.size()];
  return ContinuedFraction(std::move(a));
}

ConvergentTable::ConvergentTable(const ContinuedFraction& cf) {
  const int d = cf.depth();
  p_.resize(static_cast<std::size_t>(d) + 2);
  q_.resize(static_cast<std::size_t>(d) + 2);
  p_[0] = 1;  // p_{-1}
  q_[0] = 0;
  p_[1] = 0;  // p_0
  q_[1] = 1;
  for (int k = 1; k <= d; ++k) {
    p_[k + 1] = cf.coeff(k) * p_[k] + p_[k - 1];
    q_[k + 1] = cf.coeff(k) * q_[k] + q_[k - 1];
  }
}

mpq_class ConvergentTable::value(int k) const {
  if (k < 1 || k > depth()) throw ConfigError("convergent index outside stored depth");
  mpq_class v(p(k), q(k));
  v.canonicalize();
  return v;
}

void ConvergentTable::bracket(int k, mpq_class& lo, mpq_class& hi) const {
  if (k < 2 || k > depth()) throw ConfigError("bracket needs 2 <= k <= depth");
  mpq_class u = value(k - 1), v = value(k);
  if (u < v) {
    lo = u;
    hi = v;
  } else {
    lo = v;
    hi = u;
  }
}

mpq_class convergent_value(const ContinuedFraction& cf, int n) {
  return ConvergentTable(cf).value(n);
}

std::vector<double> bounded_density_profile(const ContinuedFraction& cf) {
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(cf.depth()));
  double sum = 0;
  for (int j = 1; j <= cf.depth(); ++j) {
    sum += static_cast<double>(cf.coeff(j));
    means.push_back(sum / j);
  }
  return means;
}

LengthTable::LengthTable(const ContinuedFraction& cf, int max_level) {
  if (max_level < -1) throw ConfigError("length table level must be >= -1");
  if (max_level > cf.depth()) {
    throw ConfigError("length table level " + std::to_string(max_level) +
                      " exceeds stored depth " + std::to_string(cf.depth()));
  }
  len_.resize(static_cast<std::size_t>(max_level) + 2);
  len_[0] = 1;  // |s_{-1}|
  if (max_level >= 0) len_[1] = 1;
  if (max_level >= 1) len_[2] = cf.coeff(1);
  for (int n = 2; n <= max_level; ++n) {
    len_[n + 1] = cf.coeff(n) * len_[n] + len_[n - 1];
  }
}

const mpz_class& LengthTable::of(int n) const {
  if (n < -1 || n > max_level()) throw ConfigError("length table index out of range");
  return len_[static_cast<std::size_t>(n + 1)];
}

int LengthTable::first_level_with_length_at_least(const mpz_class& bound, int floor_level) const {
  for (int n = std::max(floor_level, -1); n <= max_level(); ++n) {
    if (of(n) >= bound) return n;
  }
  return -1;
}

namespace {

// One interval Gauss-map step: x in (lo, hi) subset (0, 1); returns the shared
// integer part of 1/x, or -1 when the endpoints disagree (undecidable).
std::int64_t shared_reciprocal_floor(const mpq_class& lo, const mpq_class& hi) {
  // floor(1/x) for x = n/d in (0,1): floor(d/n).
  mpz_class flo, fhi;
  mpz_fdiv_q(flo.get_mpz_t(), hi.get_den().get_mpz_t(), hi.get_num().get_mpz_t());
  mpz_fdiv_q(fhi.get_mpz_t(), lo.get_den().get_mpz_t(), lo.get_num().get_mpz_t());
  // Right endpoint hi gives the smaller reciprocal. If 1/lo is an exact
  // integer, every point strictly inside the interval still has the same
  // floor, so treat that case as agreeing with hi's floor.
  if (fhi > flo) {
    mpq_class recip_lo = 1 / lo;
    if (recip_lo == fhi && fhi == flo + 1) fhi = flo;
  }
  if (flo != fhi) return -1;
  if (!flo.fits_slong_p()) throw ConfigError("continued fraction coefficient overflows int64");
  return flo.get_si();
}

}  // namespace

ContinuedFraction expand_interval(mpq_class lo, mpq_class hi, int depth) {
  if (depth < 1) throw ConfigError("expansion depth must be >= 1");
  if (depth > ContinuedFraction::max_depth) {
    throw ConfigError("expansion depth exceeds hard limit");
  }
  if (lo > hi) std::swap(lo, hi);
  if (lo <= 0 || hi >= 1) {
    throw ConfigError("expansion target must lie strictly inside (0, 1)");
  }
  std::vector<std::int64_t> a;
  a.reserve(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k) {
    if (lo == hi) {
      // Point interval: exact Gauss map on a rational.
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), lo.get_den().get_mpz_t(), lo.get_num().get_mpz_t());
      if (!f.fits_slong_p()) throw ConfigError("continued fraction coefficient overflows int64");
      a.push_back(f.get_si());
      mpq_class rem = 1 / lo - mpq_class(f);
      if (rem == 0 && k < depth) {
        // Canonical terminating expansion; still short of the requested depth.
        throw PrecisionError("expansion terminated after coefficient " + std::to_string(k) +
                             ": the value is rational, cannot reach depth " +
                             std::to_string(depth));
      }
      lo = hi = rem;
      continue;
    }
    // The interval is open: its endpoints are excluded, only interior points
    // are candidate values.
    std::int64_t ak = shared_reciprocal_floor(lo, hi);
    if (ak < 1) {
      throw PrecisionError("expansion ambiguous at coefficient " + std::to_string(k) +
                           ": interval endpoints straddle a Gauss-map boundary; supply more "
                           "digits or an exact value");
    }
    a.push_back(ak);
    // x -> 1/x - a maps the open interval to (1/hi - a, 1/lo - a), which stays
    // within [0, 1] because a is the shared floor.
    mpq_class nlo = 1 / hi - ak;
    mpq_class nhi = 1 / lo - ak;
    lo = nlo;
    hi = nhi;
    if (lo == 0 && k < depth) {
      // The open interval (0, hi) leaves the next reciprocal floor unbounded;
      // the underlying value may even be the rational endpoint itself.
      throw PrecisionError("expansion ambiguous at coefficient " + std::to_string(k + 1) +
                           ": remaining interval touches zero; supply more digits or an "
                           "exact value");
    }
  }
  return ContinuedFraction(std::move(a));
}

ContinuedFraction expand_exact(const mpq_class& x, int depth) {
  return expand_interval(x, x, depth);
}

mpq_class parse_rational(const std::string& text) {
  std::string t = text;
  if (t.rfind("q:", 0) == 0) t = t.substr(2);
  if (t.empty()) throw ConfigError("empty numeric literal");
  if (t.find('/') != std::string::npos) {
    mpq_class v;
    if (v.set_str(t, 10) != 0) throw ConfigError("bad rational literal '" + text + "'");
    if (v.get_den() == 0) throw ConfigError("zero denominator in '" + text + "'");
    v.canonicalize();
    return v;
  }
  // Decimal literal: optional sign, digits, optional fraction part.
  std::size_t pos = 0;
  bool neg = false;
  if (pos < t.size() && (t[pos] == '+' || t[pos] == '-')) neg = (t[pos++] == '-');
  std::string digits;
  int frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  for (; pos < t.size(); ++pos) {
    if (t[pos] == '.') {
      if (seen_dot) throw ConfigError("bad decimal literal '" + text + "'");
      seen_dot = true;
    } else if (t[pos] >= '0' && t[pos] <= '9') {
      digits.push_back(t[pos]);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else {
      throw ConfigError("bad decimal literal '" + text + "'");
    }
  }
  if (!seen_digit) throw ConfigError("bad decimal literal '" + text + "'");
  mpz_class num(digits.empty() ? "0" : digits, 10);
  mpz_class den = 1;
  for (int i = 0; i < frac_digits; ++i) den *= 10;
  mpq_class v(num, den);
  v.canonicalize();
  return neg ? mpq_class(-v) : v;
}

ContinuedFraction expand_numeric(const std::string& text, int depth) {
  const bool exact = text.rfind("q:", 0) == 0 || text.find('/') != std::string::npos;
  mpq_class v = parse_rational(text);
  if (exact) return expand_exact(v, depth);
  // A printed decimal stands for its value +- half an ulp of the last digit.
  const std::size_t dot = text.find('.');
  int frac_digits = 0;
  if (dot != std::string::npos) frac_digits = static_cast<int>(text.size() - dot - 1);
  mpz_class den = 2;
  for (int i = 0; i < frac_digits; ++i) den *= 10;
  mpq_class half_ulp(1, den);
  half_ulp.canonicalize();
  return expand_interval(v - half_ulp, v + half_ulp, depth);
}

}  // namespace sturm
