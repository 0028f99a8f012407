#include <doctest.h>

#include <cmath>
#include <vector>

#include "sturm/random.hpp"
#include "sturm/spectral.hpp"

namespace {

using namespace sturm;

SpectrumApprox fake_spectrum(std::vector<Band> bands) {
  SpectrumApprox sp;
  sp.bands = std::move(bands);
  return sp;
}

double total_width(const SpectrumApprox& sp) {
  double sum = 0;
  for (const Band& b : sp.bands) sum += b.width();
  return sum;
}

}  // namespace

TEST_CASE("free spectrum is the full band [-2, 2]") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  for (const int level : {6, 9}) {
    const SpectrumApprox sp = approximate_spectrum(0.0, fib, level, -2.5, 2.5);
    REQUIRE(sp.bands.size() == 1);
    CHECK(std::abs(sp.bands[0].lo - (-2.0)) < 1e-6);
    CHECK(std::abs(sp.bands[0].hi - 2.0) < 1e-6);
  }
}

TEST_CASE("coupled bands shrink with the level and verify their trace condition") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  const SpectrumApprox coarse = approximate_spectrum(1.0, fib, 6, -3.5, 3.5);
  const SpectrumApprox fine = approximate_spectrum(1.0, fib, 12, -3.5, 3.5);
  CHECK(total_width(fine) < total_width(coarse));
  CHECK(fine.bands.size() > coarse.bands.size());

  for (const SpectrumApprox& sp : {coarse, fine}) {
    double prev_hi = -1e300;
    for (const Band& b : sp.bands) {
      CHECK(b.lo <= b.hi);
      CHECK(b.lo > prev_hi);  // sorted and disjoint
      prev_hi = b.hi;
      SnProductTable table(sp.lambda, Energy{b.mid()}, fib);
      const double tr = std::exp(table.at(sp.level).log_abs_trace());
      CHECK(tr <= 2.0 + 1e-6);
    }
  }
}

TEST_CASE("spectrum input validation") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci(10);
  CHECK_THROWS_AS(approximate_spectrum(0, fib, 5, 2.0, -2.0), ConfigError);
  CHECK_THROWS_AS(approximate_spectrum(0, fib, 0, -2, 2), ConfigError);
  CHECK_THROWS_AS(approximate_spectrum(0, fib, 11, -2, 2), ConfigError);
  CHECK_THROWS_AS(approximate_spectrum(0, fib, 5, -2, 2, -1.0), ConfigError);
  CHECK_THROWS_AS(approximate_spectrum(0, fib, 5, -2, 2, 1e-9, 4), ConfigError);
}

TEST_CASE("band intersection handles nesting, touching and disjoint lists") {
  const SpectrumApprox a = fake_spectrum({{0, 2}, {3, 4}, {5, 6}});
  const SpectrumApprox b = fake_spectrum({{1, 1.5}, {1.8, 3.2}, {4, 4.5}, {7, 8}});
  const std::vector<Band> inter = intersect_bands(a, b);
  REQUIRE(inter.size() == 4);
  CHECK(inter[0].lo == doctest::Approx(1.0));
  CHECK(inter[0].hi == doctest::Approx(1.5));
  CHECK(inter[1].lo == doctest::Approx(1.8));
  CHECK(inter[1].hi == doctest::Approx(2.0));
  CHECK(inter[2].lo == doctest::Approx(3.0));
  CHECK(inter[2].hi == doctest::Approx(3.2));
  // The touching point survives as a zero-width band.
  CHECK(inter[3].lo == doctest::Approx(4.0));
  CHECK(inter[3].hi == doctest::Approx(4.0));
  CHECK(intersect_bands(a, fake_spectrum({{10, 11}})).empty());
  CHECK(intersect_bands(fake_spectrum({}), b).empty());
}

TEST_CASE("widest band midpoints are ordered by width, ties leftmost first") {
  const SpectrumApprox sp = fake_spectrum({{0, 1}, {2, 5}, {6, 7}, {8, 11}});
  const auto mids = widest_band_midpoints(sp, 3);
  REQUIRE(mids.size() == 3);
  CHECK(mids[0] == doctest::Approx(3.5));   // width 3, leftmost of the tie
  CHECK(mids[1] == doctest::Approx(9.5));   // width 3
  CHECK(mids[2] == doctest::Approx(0.5));   // width 1, leftmost again
  CHECK(widest_band_midpoints(sp, 99).size() == 4);
  CHECK(widest_band_midpoints(fake_spectrum({}), 3).empty());
}

TEST_CASE("free-case rate estimates vanish") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  const LyapunovEstimate at_zero = lyapunov_estimate(0.0, Energy{0.0}, fib, 10000);
  CHECK(at_zero.gamma <= 1e-12);
  const LyapunovEstimate at_one = lyapunov_estimate(0.0, Energy{1.0}, fib, 10000);
  CHECK(at_one.gamma <= 1e-3);
}

TEST_CASE("rate samples carry consistent envelope bookkeeping") {
  const ContinuedFraction silver = ContinuedFraction::silver();
  const LyapunovEstimate est = lyapunov_estimate(1.2, Energy{0.7, 0.1}, silver, 50000, 1e-2);
  REQUIRE(!est.samples.empty());
  const LengthTable lengths(silver, silver.depth());
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < est.samples.size(); ++i) {
    const LyapunovSample& s = est.samples[i];
    CHECK(s.level == static_cast<int>(i) + 1);
    CHECK(mpz_class(s.length) == lengths.of(s.level));
    CHECK(s.f_upper == doctest::Approx(std::max(s.rate, s.prev_rate)));
    if (i > 0) CHECK(s.prev_rate == doctest::Approx(est.samples[i - 1].rate));
    running = std::min(running, s.f_upper);
    CHECK(s.inf_f == doctest::Approx(running));
    CHECK(s.det_error_bound >= 0);
  }
  CHECK(est.inf_f == doctest::Approx(running));
  CHECK(est.gamma == doctest::Approx(std::max(running, 0.0)));
  CHECK(est.certificate_gap ==
        doctest::Approx(std::abs(est.samples.back().f_upper - est.inf_f)));
  CHECK(est.converged == (est.certificate_gap <= est.tol));
  // The sandwich: gamma never exceeds the certified upper envelope.
  CHECK(est.gamma <= est.samples.back().f_upper + 1e-12);

  CHECK_THROWS_AS(lyapunov_estimate(1.0, Energy{0}, silver, 50000, 0.0), ConfigError);
  CHECK_THROWS_AS(lyapunov_estimate(1.0, Energy{0}, silver, 0), ConfigError);
}

TEST_CASE("far off-spectrum energies show strong growth") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  CHECK(lyapunov_estimate(1.0, Energy{5.0}, fib, 10000).gamma > 1.0);
  // Imaginary offset keeps the energy off the real spectrum.
  CHECK(lyapunov_estimate(1.0, Energy{2.0, 1.0}, fib, 10000).gamma >= 0.1);
}

TEST_CASE("phase rates match the family estimate at matching lengths") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  const LyapunovEstimate est = lyapunov_estimate(1.0, Energy{0.5}, fib, 100000);
  // Find the level-12 sample: |s_12| = 233.
  const LyapunovSample* s12 = nullptr;
  for (const auto& s : est.samples) {
    if (s.level == 12) s12 = &s;
  }
  REQUIRE(s12 != nullptr);
  const std::vector<std::uint64_t> marks = {1, s12->length};
  const auto phases = lyapunov_along_phase(1.0, Energy{0.5}, fib, mpq_class(0), marks);
  REQUIRE(phases.size() == 2);
  // N = 1: exactly ln||T(c_1)||; the first letter of the golden word is 1.
  const double t1_norm = std::log(sigma_max(local_matrix(1.0, Energy{0.5}, 1)));
  CHECK(phases[0].length == 1);
  CHECK(phases[0].rate == doctest::Approx(t1_norm).epsilon(1e-12));
  // N = |s_12| with theta = 0: same word, same product.
  CHECK(phases[1].rate == doctest::Approx(s12->rate).epsilon(1e-9));

  CHECK_THROWS_AS(lyapunov_along_phase(1.0, Energy{0}, fib, mpq_class(0), {}), ConfigError);
  const std::vector<std::uint64_t> zero = {0};
  CHECK_THROWS_AS(lyapunov_along_phase(1.0, Energy{0}, fib, mpq_class(0), zero), ConfigError);
  // Duplicate and unsorted marks collapse to sorted unique lengths.
  const std::vector<std::uint64_t> messy = {100, 10, 100};
  const auto dedup = lyapunov_along_phase(1.0, Energy{0}, fib, mpq_class(0), messy);
  REQUIRE(dedup.size() == 2);
  CHECK(dedup[0].length == 10);
  CHECK(dedup[1].length == 100);
}

TEST_CASE("subadditive limits recover length, letter density and the growth rate") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();

  const auto length_f = [](const Word& w) { return static_cast<double>(w.size()); };
  const SubadditiveLimit unit = subadditive_limit(length_f, fib, 20000, 1e-9, 7);
  CHECK(unit.limit == doctest::Approx(1.0));
  CHECK(unit.converged);
  for (const auto& s : unit.samples) CHECK(s.rate == doctest::Approx(1.0));

  // Ones in s_n count p_n, so the density tends to alpha.
  const auto ones_f = [](const Word& w) { return static_cast<double>(w.count_ones()); };
  const SubadditiveLimit dens = subadditive_limit(ones_f, fib, 20000, 1e-2, 7);
  const double alpha = (std::sqrt(5.0) - 1) / 2;
  CHECK(std::abs(dens.limit - alpha) < 1e-3);

  // The log-norm functional reproduces the rate estimate.
  const auto norm_f = [](const Word& w) {
    return word_product(1.0, Energy{0.5}, w).log_norm();
  };
  const SubadditiveLimit rate = subadditive_limit(norm_f, fib, 20000, 1e-1, 7);
  const LyapunovEstimate est = lyapunov_estimate(1.0, Energy{0.5}, fib, 20000);
  CHECK(rate.limit == doctest::Approx(est.inf_f).epsilon(1e-9));

  // A super-additive functional is rejected by the spot checks.
  const auto square_f = [](const Word& w) {
    return static_cast<double>(w.size()) * static_cast<double>(w.size());
  };
  CHECK_THROWS_AS(subadditive_limit(square_f, fib, 20000, 1e-2, 7), ConfigError);
}

TEST_CASE("growth envelopes majorize their samples, free case stays flat") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  const std::vector<Energy> free_e = {Energy{1.0}};
  const GrowthFit flat = growth_fit(0.0, fib, free_e, 4000, 8, 99);
  REQUIRE(flat.energies.size() == 1);
  const EnergyGrowth& g = flat.energies[0];
  CHECK(g.fitted_length == 4000);
  CHECK(g.prefix_fit.slope >= 0.0);
  CHECK(g.prefix_fit.slope <= 0.05);
  CHECK(g.fit.slope == doctest::Approx(2 * g.prefix_fit.slope));
  CHECK(g.max_violation <= 0.0);
  CHECK(!flat.density_warning);

  bool saw_prefix = false, saw_window = false;
  for (const GrowthPoint& p : g.points) {
    CHECK(p.length >= 1);
    CHECK(p.length <= 4000);
    if (p.from_prefix) {
      saw_prefix = true;
      CHECK(p.offset == 0);
    } else {
      saw_window = true;
      CHECK(p.offset >= 1);
    }
    CHECK(p.det_error_bound >= 0);
  }
  CHECK(saw_prefix);
  CHECK(saw_window);

  // Fresh resamples stay under the fitted envelope.
  CHECK(envelope_violation(0.0, fib, g, 4000, 8, 1234) <= 0.0);
  CHECK(envelope_violation(0.0, fib, g, 4000, 8, 777) <= 0.0);

  CHECK_THROWS_AS(growth_fit(0.0, fib, {}, 4000, 8, 99), ConfigError);
  CHECK_THROWS_AS(growth_fit(0.0, fib, free_e, 1, 8, 99), ConfigError);
  CHECK_THROWS_AS(growth_fit(0.0, fib, free_e, 4000, -1, 99), ConfigError);
}

TEST_CASE("coupled growth envelope certified on fresh draws") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  const SpectrumApprox sp = approximate_spectrum(1.0, fib, 10, -3.5, 3.5);
  REQUIRE(!sp.bands.empty());
  const std::vector<Energy> energies = {Energy{widest_band_midpoints(sp, 1)[0]}};
  const GrowthFit fit = growth_fit(1.0, fib, energies, 3000, 10, 321);
  const EnergyGrowth& g = fit.energies[0];
  CHECK(std::isfinite(g.fit.slope));
  CHECK(g.max_violation <= 0.0);
  CHECK(envelope_violation(1.0, fib, g, 3000, 10, 111) <= 0.0);
  CHECK(envelope_violation(1.0, fib, g, 3000, 10, 222) <= 0.0);
}

TEST_CASE("certified bounds pick the documented routes") {
  const ContinuedFraction fib = ContinuedFraction::fibonacci();
  const std::vector<Energy> energies = {Energy{0.2}};
  const GrowthFit fit = growth_fit(1.0, fib, energies, 2000, 8, 5);
  const EnergyGrowth& g = fit.energies[0];

  // "0110": cut at the level-3/4 boundary with x = "01", y = "10".
  const CertifiedBound b = certified_bound(1.0, Word::from_string("0110"), fib, g);
  CHECK(b.split.level == 3);
  CHECK(b.split.left.str() == "01");
  CHECK(b.split.right.str() == "10");
  CHECK(b.route == "short-x");
  CHECK(b.bound_log >= b.direct_log_norm - 1e-9);
  CHECK(b.bound_log == doctest::Approx(std::min(b.path_log, b.envelope_log)));

  // A prefix of the infinite word needs no left part at all.
  const CertifiedBound pre = certified_bound(1.0, c_prefix(fib, 21), fib, g);
  CHECK(pre.route == "empty-x");
  CHECK(pre.split.left.empty());

  // Long factors exercise the reversal route.
  DetRng rng(61);
  const Word c = c_prefix(fib, 4000);
  bool saw_reversal = false;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t len = 3 + rng.below(1998);
    const std::uint64_t off = rng.below(c.size() - len + 1);
    const CertifiedBound rb = certified_bound(1.0, c.subword(off, len), fib, g);
    CHECK(rb.bound_log >= rb.direct_log_norm -
                              1e-9 * std::max(1.0, std::abs(rb.direct_log_norm)));
    if (rb.route == "reversal") {
      saw_reversal = true;
      CHECK(rb.reversal_prefix_len + 2 == rb.split.left.size());
    }
  }
  CHECK(saw_reversal);

  CHECK_THROWS_AS(certified_bound(1.0, Word(), fib, g), ConfigError);
  CHECK_THROWS_AS(certified_bound(1.0, Word::filled(3000, 0), fib, g), ConfigError);
}
