#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sturm/random.hpp"
#include "sturm/sturmian.hpp"
#include "sturm/transfer.hpp"

namespace {

using namespace sturm;

Word random_word(DetRng& rng, std::uint64_t len) {
  Word w;
  for (std::uint64_t i = 0; i < len; ++i) w.push_back(static_cast<int>(rng.below(2)));
  return w;
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Chebyshev polynomials of the second kind by their recurrence.
double chebyshev_u(int n, double x) {
  if (n < 0) return 0;
  double um1 = 0, u = 1;  // U_{-1}, U_0
  for (int k = 0; k < n; ++k) {
    const double next = 2 * x * u - um1;
    um1 = u;
    u = next;
  }
  return u;
}

}  // namespace

TEST_CASE("one-site matrices and the closed-form 2x2 singular values") {
  const Mat2c t1 = local_matrix(2.0, Energy{3.0}, 1);
  CHECK(t1.a == Energy{1.0});
  CHECK(t1.b == Energy{-1.0});
  CHECK(t1.c == Energy{1.0});
  CHECK(t1.d == Energy{0.0});
  const Mat2c t0 = local_matrix(2.0, Energy{3.0}, 0);
  CHECK(t0.a == Energy{3.0});
  CHECK(std::abs(t0.det() - Energy{1.0}) == 0);
  CHECK(std::abs(t1.det() - Energy{1.0}) == 0);

  CHECK(sigma_max(Mat2c::identity()) == doctest::Approx(1.0));
  CHECK(sigma_min(Mat2c::identity()) == doctest::Approx(1.0));
  const Mat2c diag{3.0, 0, 0, 0.5};
  CHECK(sigma_max(diag) == doctest::Approx(3.0));
  CHECK(sigma_min(diag) == doctest::Approx(0.5));

  DetRng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat2c m{Energy{rng.real(-2, 2), rng.real(-2, 2)},
                  Energy{rng.real(-2, 2), rng.real(-2, 2)},
                  Energy{rng.real(-2, 2), rng.real(-2, 2)},
                  Energy{rng.real(-2, 2), rng.real(-2, 2)}};
    const double smax = sigma_max(m), smin = sigma_min(m);
    CHECK(smax >= smin);
    CHECK(smax * smin == doctest::Approx(std::abs(m.det())).epsilon(1e-10));
    CHECK(smax * smax + smin * smin ==
          doctest::Approx(m.frobenius_sq()).epsilon(1e-10));
    CHECK(smax >= m.max_abs() - 1e-12);
    CHECK(m.max_abs() >= smax / 2 - 1e-12);
  }
}

TEST_CASE("hand-checked product over a two-letter word") {
  // lambda = 2, E = 0, w = "10": M = T(0) T(1) = [[-1, 0], [-2, -1]].
  const TransferProduct p = word_product(2.0, Energy{0.0}, Word::from_string("10"));
  CHECK(p.length == 2);
  const double scale = std::exp(p.log_scale);
  CHECK(std::abs(p.m.a * scale - Energy{-1.0}) < 1e-14);
  CHECK(std::abs(p.m.b * scale - Energy{0.0}) < 1e-14);
  CHECK(std::abs(p.m.c * scale - Energy{-2.0}) < 1e-14);
  CHECK(std::abs(p.m.d * scale - Energy{-1.0}) < 1e-14);
  // Spectral norm of [[-1,0],[-2,-1]] is 1 + sqrt(2).
  CHECK(p.log_norm() == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK(p.det_residual() < 1e-13);
  CHECK(p.det_measurable());

  // Empty word: identity.
  const TransferProduct e = word_product(1.0, Energy{0.5}, Word());
  CHECK(e.length == 0);
  CHECK(e.log_norm() == doctest::Approx(0.0));
  CHECK(e.log_abs_trace() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("free products follow the Chebyshev closed form") {
  DetRng rng(52);
  for (const double E : {0.3, -1.2, 1.9}) {
    const double x = E / 2;
    for (const std::uint64_t n : {1, 2, 3, 5, 17, 40}) {
      const Word w = random_word(rng, n);  // letters are irrelevant at lambda = 0
      const TransferProduct p = word_product(0.0, Energy{E}, w);
      const int ni = static_cast<int>(n);
      const Mat2c closed{Energy{chebyshev_u(ni, x)}, Energy{-chebyshev_u(ni - 1, x)},
                         Energy{chebyshev_u(ni - 1, x)}, Energy{-chebyshev_u(ni - 2, x)}};
      CHECK(rel_diff(p.log_norm(), std::log(sigma_max(closed))) < 1e-10);
      const double trace = chebyshev_u(ni, x) - chebyshev_u(ni - 2, x);
      if (std::abs(trace) > 1e-3) {
        CHECK(rel_diff(p.log_abs_trace(), std::log(std::abs(trace))) < 1e-8);
      }
      // 2 cos(n arccos(E/2)) is the same trace through the angle form.
      CHECK(std::abs(trace - 2 * std::cos(ni * std::acos(x))) < 1e-9 * ni);
    }
  }
  // Vanishing trace: E = 0, single letter -> [[0,-1],[1,0]].
  const TransferProduct rot = word_product(0.0, Energy{0.0}, Word::from_string("0"));
  CHECK(rot.log_abs_trace() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("reversal preserves norms and traces") {
  DetRng rng(53);
  for (int trial = 0; trial < 60; ++trial) {
    const Word w = random_word(rng, 1 + rng.below(300));
    const double lambda = rng.real(-3, 3);
    const Energy E{rng.real(-4, 4), rng.real(-1, 1)};
    const TransferProduct fwd = word_product(lambda, E, w);
    const TransferProduct rev = reversed_product(lambda, E, w);
    CHECK(rev.length == w.size());
    CHECK(rel_diff(fwd.log_norm(), rev.log_norm()) < 1e-10);
    // The reversed product is the word product of the reversed word.
    const TransferProduct direct = word_product(lambda, E, w.reversed());
    CHECK(rel_diff(rev.log_norm(), direct.log_norm()) < 1e-12);
    const Energy tr_rev = rev.m.trace() * std::exp(rev.log_scale);
    const Energy tr_dir = direct.m.trace() * std::exp(direct.log_scale);
    CHECK(std::abs(tr_rev - tr_dir) <= 1e-9 * std::max(1.0, std::abs(tr_dir)));
  }
}

TEST_CASE("concat and power compose products") {
  DetRng rng(54);
  for (int trial = 0; trial < 40; ++trial) {
    const Word u = random_word(rng, rng.below(100));
    const Word v = random_word(rng, rng.below(100));
    const double lambda = rng.real(-2, 2);
    const Energy E{rng.real(-3, 3), rng.real(-0.5, 0.5)};
    Word uv = u;
    uv.append(v);
    const TransferProduct joined = concat(word_product(lambda, E, u), word_product(lambda, E, v));
    const TransferProduct direct = word_product(lambda, E, uv);
    CHECK(joined.length == uv.size());
    CHECK(rel_diff(joined.log_norm(), direct.log_norm()) < 1e-11);

    const std::uint64_t k = rng.below(6);
    Word repeated;
    repeated.append_copies(u, k);
    const TransferProduct pw = power(word_product(lambda, E, u), k);
    const TransferProduct pd = word_product(lambda, E, repeated);
    CHECK(pw.length == repeated.size());
    CHECK(rel_diff(pw.log_norm(), pd.log_norm()) < 1e-10);
  }
}

TEST_CASE("family products equal direct products over the built words") {
  DetRng rng(55);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<std::int64_t> coeffs;
    for (int i = 0; i < 8; ++i) coeffs.push_back(rng.range(1, 3));
    const ContinuedFraction cf(coeffs);
    const double lambda = rng.real(-2, 2);
    const Energy E{rng.real(-3, 3), rng.real(-0.5, 0.5)};
    SnProductTable table(lambda, E, cf);
    for (int n = -1; n <= 8; ++n) {
      const TransferProduct direct = word_product(lambda, E, build_sn(cf, n));
      const TransferProduct& fam = table.at(n);
      CHECK(fam.length == direct.length);
      CHECK(rel_diff(fam.log_norm(), direct.log_norm()) < 1e-10);
    }
    CHECK(rel_diff(sn_product(lambda, E, cf, 6).log_norm(),
                   table.at(6).log_norm()) < 1e-14);
  }
  // Single letters: tr M(s_0) = E, tr M(s_{-1}) = E - lambda.
  SnProductTable single(1.5, Energy{0.25}, ContinuedFraction::fibonacci());
  CHECK(std::abs(single.at(0).m.trace() * std::exp(single.at(0).log_scale) - Energy{0.25}) <
        1e-15);
  CHECK(std::abs(single.at(-1).m.trace() * std::exp(single.at(-1).log_scale) -
                 Energy{0.25 - 1.5}) < 1e-15);
}

TEST_CASE("golden-family traces satisfy the three-term trace recursion") {
  // x_{n+1} = x_n x_{n-1} - x_{n-2} for traces along [1,1,1,...]. Needs both
  // concatenation identities s_{n+1} = s_n s_{n-1} and s_n = s_{n-1} s_{n-2},
  // so it starts at n = 2 (s_1 is the bare seed, not s_0 s_{-1}).
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  for (const double E : {0.0, 0.5, 2.0}) {
    SnProductTable table(1.0, Energy{E}, fib);
    const auto trace_at = [&](int n) {
      const TransferProduct& p = table.at(n);
      return (p.m.trace() * std::exp(p.log_scale)).real();
    };
    for (int n = 2; n <= 14; ++n) {
      const double xp = trace_at(n + 1), xn = trace_at(n), xm = trace_at(n - 1),
                   xmm = trace_at(n - 2);
      if (std::abs(xp) > 1e9 || std::abs(xn * xm) > 1e9) break;  // double headroom
      CHECK(std::abs(xp - (xn * xm - xmm)) < 1e-6 * std::max(1.0, std::abs(xp)));
    }
  }
}

TEST_CASE("determinant stays near one with an honest error budget") {
  DetRng rng(56);
  for (int trial = 0; trial < 80; ++trial) {
    const Word w = random_word(rng, 1 + rng.below(2000));
    const double lambda = rng.real(-3, 3);
    const Energy E = (trial % 2 == 0) ? Energy{rng.real(-4, 4)}
                                      : Energy{rng.real(-4, 4), rng.real(-2, 2)};
    const TransferProduct p = word_product(lambda, E, w);
    CHECK(p.det_error_bound >= 0);
    CHECK(p.det_error_bound <= 1e-10 * static_cast<double>(w.size()));
    CHECK(p.log_norm() >= -1e-12);  // det 1 forces sigma_max >= 1
    // The residual only resolves to budget accuracy while the whole product
    // stayed mildly conditioned; the same gate the verification suite uses.
    if (2 * std::abs(p.log_scale) <= 18 && sigma_min(p.m) >= 1e-4) {
      CHECK(p.det_measurable());  // the computability gate is strictly laxer
      CHECK(p.det_residual() <= 1e-10 * std::max(1.0, static_cast<double>(w.size())));
    }
  }
}

TEST_CASE("products renormalize through huge dynamic ranges") {
  // E far off the spectrum: norms grow like e^{1.7 n}, far past double range.
  const TransferProduct p = word_product(1.0, Energy{6.0}, Word::filled(3000, 0));
  CHECK(std::isfinite(p.log_norm()));
  CHECK(p.log_norm() > 3000.0);  // ln||M|| ~ n ln(3+sqrt(8)) ~ 1.76 n
  CHECK(p.log_norm() < 3000.0 * 2);
  CHECK_FALSE(p.det_measurable());  // sigma_min underflows the measurable gate
  CHECK(p.det_error_bound < 1e-10 * 3000);
}
