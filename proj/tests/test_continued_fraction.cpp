#include <doctest.h>

#include <gmpxx.h>

#include <vector>

#include "sturm/continued_fraction.hpp"
#include "sturm/random.hpp"

namespace {

using namespace sturm;

// Plain Euclid-style expansion of an exact rational in (0, 1); an independent
// derivation of the coefficients the interval Gauss map should produce.
std::vector<std::int64_t> euclid_expansion(mpq_class x, std::size_t limit) {
  std::vector<std::int64_t> a;
  mpz_class num = x.get_num(), den = x.get_den();
  while (num != 0 && a.size() < limit) {
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
    a.push_back(q.get_si());
    den = num;
    num = r;
  }
  return a;
}

// Evaluate [a_1, ..., a_k] bottom-up, independently of ConvergentTable.
mpq_class evaluate_cf(const std::vector<std::int64_t>& a) {
  mpq_class v = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    v = 1 / (mpq_class(*it) + v);
  }
  return v;
}

std::vector<std::int64_t> random_coeffs(DetRng& rng, int depth, int max_coeff) {
  std::vector<std::int64_t> a;
  for (int i = 0; i < depth; ++i) a.push_back(rng.range(1, max_coeff));
  return a;
}

}  // namespace

TEST_CASE("constructor and presets validate coefficients") {
  CHECK_THROWS_AS(ContinuedFraction(std::vector<std::int64_t>{}), ConfigError);
  CHECK_THROWS_AS(ContinuedFraction({1, 0, 1}), ConfigError);
  CHECK_THROWS_AS(ContinuedFraction({-2}), ConfigError);
  CHECK_THROWS_AS(ContinuedFraction(std::vector<std::int64_t>(5000, 1)), ConfigError);

  const ContinuedFraction fib = ContinuedFraction::fibonacci(10);
  REQUIRE(fib.depth() == 10);
  CHECK(fib.coeff(1) == 1);
  CHECK(fib.coeff(10) == 1);
  CHECK_THROWS_AS(fib.coeff(0), ConfigError);
  CHECK_THROWS_AS(fib.coeff(11), ConfigError);

  const ContinuedFraction alt = ContinuedFraction::periodic({1, 2}, 5);
  CHECK(alt.coeffs() == std::vector<std::int64_t>{1, 2, 1, 2, 1});
  CHECK(ContinuedFraction::silver(3).coeffs() == std::vector<std::int64_t>{2, 2, 2});
  CHECK_THROWS_AS(ContinuedFraction::periodic({}, 4), ConfigError);
  CHECK_THROWS_AS(ContinuedFraction::periodic({1}, 0), ConfigError);
}

TEST_CASE("convergents match independent bottom-up evaluation") {
  DetRng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const auto coeffs = random_coeffs(rng, 1 + static_cast<int>(rng.below(14)), 5);
    const ContinuedFraction cf(coeffs);
    const ConvergentTable table(cf);
    REQUIRE(table.depth() == cf.depth());
    CHECK(table.p(-1) == 1);
    CHECK(table.q(-1) == 0);
    CHECK(table.p(0) == 0);
    CHECK(table.q(0) == 1);
    for (int k = 1; k <= cf.depth(); ++k) {
      const std::vector<std::int64_t> head(coeffs.begin(), coeffs.begin() + k);
      CHECK(table.value(k) == evaluate_cf(head));
      CHECK(convergent_value(cf, k) == evaluate_cf(head));
      // Neighbouring convergents satisfy q_k p_{k-1} - p_k q_{k-1} = (-1)^k.
      const mpz_class det = table.q(k) * table.p(k - 1) - table.p(k) * table.q(k - 1);
      CHECK(det == ((k % 2 == 0) ? 1 : -1));
    }
  }
}

TEST_CASE("bracket straddles every deeper continuation") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci(20);
  const ConvergentTable table(fib);
  for (int k = 2; k <= 12; ++k) {
    mpq_class lo, hi;
    table.bracket(k, lo, hi);
    CHECK(lo < hi);
    // Any deeper convergent lies strictly inside.
    CHECK(lo < table.value(k + 2));
    CHECK(table.value(k + 2) < hi);
  }
  mpq_class lo, hi;
  CHECK_THROWS_AS(table.bracket(1, lo, hi), ConfigError);
}

TEST_CASE("exact expansion reproduces Euclid's algorithm") {
  DetRng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    // A random rational in (0, 1) with a reasonably deep expansion.
    const auto coeffs = random_coeffs(rng, 12, 4);
    const mpq_class v = evaluate_cf(coeffs);
    const auto oracle = euclid_expansion(v, 10);
    REQUIRE(oracle.size() == 10);
    const ContinuedFraction got = expand_exact(v, 10);
    CHECK(got.coeffs() == oracle);
    // The generating coefficients agree up to the canonical tail ambiguity
    // [..., a] == [..., a-1, 1]; the first depth-2 places are unambiguous.
    for (int k = 0; k < 10; ++k) CHECK(got.coeffs()[k] == coeffs[k]);
  }
  // Terminating rational: cannot reach the requested depth.
  CHECK_THROWS_AS(expand_exact(mpq_class(1, 3), 5), PrecisionError);
  CHECK_THROWS_AS(expand_exact(mpq_class(2), 3), ConfigError);  // outside (0,1)
}

TEST_CASE("interval expansion brackets the golden mean from an isqrt sandwich") {
  // alpha = (sqrt(5) - 1) / 2, pinned between consecutive integer square roots
  // of 5 * 10^80.
  mpz_class pow40 = 1;
  for (int i = 0; i < 40; ++i) pow40 *= 10;
  const mpz_class five_pow80 = 5 * pow40 * pow40;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), five_pow80.get_mpz_t());
  mpq_class lo(root - pow40, 2 * pow40);
  mpq_class hi(root + 1 - pow40, 2 * pow40);
  lo.canonicalize();
  hi.canonicalize();

  const ContinuedFraction got = expand_interval(lo, hi, 40);
  CHECK(got.coeffs() == std::vector<std::int64_t>(40, 1));

  // The same sandwich cannot support depths where convergent separation
  // outruns the 40-digit accuracy.
  CHECK_THROWS_AS(expand_interval(lo, hi, 200), PrecisionError);
}

TEST_CASE("interval expansion refuses straddling intervals") {
  CHECK_THROWS_AS(expand_interval(mpq_class(49, 100), mpq_class(51, 100), 3), PrecisionError);
  CHECK_THROWS_AS(expand_interval(mpq_class(-1, 2), mpq_class(1, 2), 3), ConfigError);
  CHECK_THROWS_AS(expand_interval(mpq_class(1, 2), mpq_class(3, 2), 3), ConfigError);
}

TEST_CASE("numeric expansion: decimals carry half-ulp intervals") {
  // 20 accurate digits of the golden mean decide well past depth 20.
  const ContinuedFraction got = expand_numeric("0.61803398874989484820", 20);
  CHECK(got.coeffs() == std::vector<std::int64_t>(20, 1));
  // Three digits cannot pin 32 coefficients.
  CHECK_THROWS_AS(expand_numeric("0.618", 32), PrecisionError);
  // Exact forms expand as points.
  const ContinuedFraction exact = expand_numeric("q:13/21", 4);
  CHECK(exact.coeffs() == std::vector<std::int64_t>{1, 1, 1, 1});
  CHECK_THROWS_AS(expand_numeric("not-a-number", 4), ConfigError);
}

TEST_CASE("parse_rational handles decimal and fraction forms") {
  CHECK(parse_rational("0.25") == mpq_class(1, 4));
  CHECK(parse_rational("3/10") == mpq_class(3, 10));
  CHECK(parse_rational("q:7/9") == mpq_class(7, 9));
  CHECK(parse_rational("-0.5") == mpq_class(-1, 2));
  CHECK(parse_rational("2") == mpq_class(2));
  CHECK(parse_rational("0.7") == mpq_class(7, 10));
  CHECK_THROWS_AS(parse_rational(""), ConfigError);
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rational("1.2.3"), ConfigError);
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
}

TEST_CASE("length table equals the convergent denominators") {
  DetRng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const ContinuedFraction cf(random_coeffs(rng, 1 + static_cast<int>(rng.below(12)), 4));
    const LengthTable lengths(cf, cf.depth());
    const ConvergentTable table(cf);
    CHECK(lengths.of(-1) == 1);
    CHECK(lengths.of(0) == 1);
    // |s_n| obeys the q-recursion with the same seeds from level 0 on.
    for (int n = 1; n <= cf.depth(); ++n) CHECK(lengths.of(n) == table.q(n));
    CHECK_THROWS_AS(lengths.of(cf.depth() + 1), ConfigError);
    CHECK_THROWS_AS(lengths.of(-2), ConfigError);

    // Threshold search agrees with a linear scan.
    for (int probe = 0; probe < 8; ++probe) {
      const mpz_class bound = static_cast<long>(rng.below(200));
      int expect = -1;
      for (int n = -1; n <= lengths.max_level(); ++n) {
        if (lengths.of(n) >= bound) {
          expect = n;
          break;
        }
      }
      CHECK(lengths.first_level_with_length_at_least(bound) == expect);
    }
  }
}

TEST_CASE("density profile is the running mean of coefficients") {
  const ContinuedFraction cf({1, 2, 3});
  const std::vector<double> means = bounded_density_profile(cf);
  REQUIRE(means.size() == 3);
  CHECK(means[0] == doctest::Approx(1.0));
  CHECK(means[1] == doctest::Approx(1.5));
  CHECK(means[2] == doctest::Approx(2.0));
}
