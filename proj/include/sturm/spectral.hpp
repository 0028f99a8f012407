#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sturm/partition.hpp"
#include "sturm/random.hpp"
#include "sturm/sturmian.hpp"
#include "sturm/transfer.hpp"

namespace sturm {

// ---------------------------------------------------------------------------
// Spectrum approximation via trace bands of the level-n periodic word.

struct Band {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
  double mid() const { return (lo + hi) / 2; }
};

struct SpectrumApprox {
  double lambda = 0;
  int level = 0;
  double window_lo = 0, window_hi = 0;
  std::uint64_t grid = 0;
  double trace_tol = 0;
  std::vector<Band> bands;  // sorted, disjoint, |trace| <= 2 inside
  // Set when bisection hit the double-precision floor before reaching the
  // trace tolerance near some edge (tolerance smaller than representable).
  bool edge_warning = false;
};

// Energies where |tr M(lambda, E, s_level)| <= 2: coarse grid scan, then
// bisection refining each edge until the trace is within trace_tol of 2.
// Gaps without a witness point of |trace| > 2 + trace_tol are merged away.
SpectrumApprox approximate_spectrum(double lambda, const ContinuedFraction& cf, int level,
                                    double window_lo, double window_hi,
                                    double trace_tol = 1e-9, std::uint64_t grid = 40000,
                                    int jobs = 1);

// Intersection of two band lists, the usual proxy for the limit spectrum
// when taken over consecutive levels. Zero-width intersections are kept.
std::vector<Band> intersect_bands(const SpectrumApprox& a, const SpectrumApprox& b);

// Midpoints of the k widest bands, widest first; ties resolve left to right.
std::vector<double> widest_band_midpoints(const SpectrumApprox& spectrum, std::size_t k);

// ---------------------------------------------------------------------------
// Lyapunov exponent along the canonical word family.

struct LyapunovSample {
  int level = 0;            // n
  std::uint64_t length = 0; // |s_n|
  double rate = 0;          // L(s_n)/|s_n|
  double prev_rate = 0;     // L(s_{n-1})/|s_{n-1}|
  double f_upper = 0;       // max(rate, prev_rate); non-increasing in n
  double inf_f = 0;         // running infimum of f_upper up to this level
  double det_error_bound = 0;  // error budget of the underlying product
};

struct LyapunovEstimate {
  double lambda = 0;
  Energy energy{0};
  double tol = 0;
  std::vector<LyapunovSample> samples;
  double inf_f = 0;   // smallest f_upper seen
  double gamma = 0;   // inf_f clamped to >= 0
  double certificate_gap = 0;  // |last f_upper - inf_f|
  bool converged = false;      // certificate_gap <= tol
};

// Rates along s_n up to the largest level with |s_n| <= max_length (and within
// the stored depth). The f_upper sequence is a certified upper envelope of the
// limit; its infimum is the estimate.
LyapunovEstimate lyapunov_estimate(double lambda, Energy E, const ContinuedFraction& cf,
                                   std::uint64_t max_length, double tol = 1e-2);

// Rates L(v[1..N])/N along a mechanically generated word with phase theta.
struct PhaseSample {
  std::uint64_t length = 0;
  double rate = 0;
  double det_error_bound = 0;
};
std::vector<PhaseSample> lyapunov_along_phase(double lambda, Energy E,
                                              const ContinuedFraction& cf,
                                              const mpq_class& theta,
                                              std::span<const std::uint64_t> lengths,
                                              std::uint64_t budget = default_letter_budget);

// ---------------------------------------------------------------------------
// Generic subadditive limit along the word family.

struct SubadditiveSample {
  int level = 0;
  std::uint64_t length = 0;
  double value = 0;   // F(s_n)
  double rate = 0;    // F(s_n)/|s_n|
  double f_upper = 0; // max(rate, previous rate)
};

struct SubadditiveLimit {
  double tol = 0;
  std::vector<SubadditiveSample> samples;
  double limit = 0;  // inf of f_upper
  double certificate_gap = 0;  // |last f_upper - limit|
  bool converged = false;
};

// Evaluates F on the family words (materialized; budget applies) and returns
// the subadditive limit estimate. Random prefix/suffix splits of the family
// words spot-check F(uv) <= F(u) + F(v); a violation beyond slack raises
// ConfigError since the limit theory needs subadditivity.
SubadditiveLimit subadditive_limit(const std::function<double(const Word&)>& F,
                                   const ContinuedFraction& cf, std::uint64_t max_length,
                                   double tol, std::uint64_t seed, int spot_checks = 32,
                                   std::uint64_t budget = default_letter_budget,
                                   double slack = 1e-9);

// ---------------------------------------------------------------------------
// Polynomial growth envelopes over (ln length, log-norm) points.

struct EnvelopeFit {
  double intercept = 0;  // ln C
  double slope = 0;      // mu, clamped to >= 0
};

struct GrowthPoint {
  std::uint64_t length = 0;
  std::uint64_t offset = 0;  // 1-based start within c (0 for prefix points)
  double log_norm = 0;
  bool from_prefix = false;
  double det_error_bound = 0;  // error budget of the underlying product
};

struct EnergyGrowth {
  Energy energy{0};
  std::uint64_t fitted_length = 0;  // envelope certified for |w| <= this
  // Envelope over every prefix length n <= max_length: L(c[1..n]) <=
  // intercept + slope * ln n, fitted on the upper convex hull by minimizing
  // the mean residual over slopes (clamped nonnegative).
  EnvelopeFit prefix_fit;
  // Envelope valid for every factor w with |w| <= max_length, derived from
  // prefix_fit through the two-block/reversal decomposition: slope doubles
  // and the intercept absorbs the one-site norm bound F:
  //   ln C = ln(F^2 (C_prefix^2 + 1)), mu = 2 * mu_prefix.
  EnvelopeFit fit;
  double log_f = 0;          // ln F, F = max(||T(0)||, ||T(1)||, 1)
  double max_violation = 0;  // max over sampled points of L - envelope; <= 0
  std::vector<GrowthPoint> points;  // geometric prefix marks + random windows
};

struct GrowthFit {
  double lambda = 0;
  std::uint64_t max_length = 0;
  int windows_per_length = 0;
  std::uint64_t seed = 0;
  bool density_warning = false;  // coefficient running means kept growing
  std::vector<EnergyGrowth> energies;
};

GrowthFit growth_fit(double lambda, const ContinuedFraction& cf, std::span<const Energy> energies,
                     std::uint64_t max_length, int windows_per_length, std::uint64_t seed,
                     std::uint64_t budget = default_letter_budget, int jobs = 1);

// Check a fresh sample of factor log-norms against an existing envelope;
// returns the max violation (<= 0 when the envelope still majorizes).
double envelope_violation(double lambda, const ContinuedFraction& cf, const EnergyGrowth& growth,
                          std::uint64_t max_length, int windows_per_length, std::uint64_t seed,
                          std::uint64_t budget = default_letter_budget);

// ---------------------------------------------------------------------------
// Certified norm ceiling for a single factor.

struct CertifiedBound {
  double direct_log_norm = 0;  // ln||M(w)|| computed outright
  double bound_log = 0;        // certified ceiling (min of the two routes)
  double envelope_log = 0;     // ln C + mu ln|w| from the factor envelope
  double path_log = 0;         // decomposition route x/y pieces bounded separately
  TwoBlockSplit split;
  std::uint64_t reversal_prefix_len = 0;  // |v| with x reversed = d1 d2 v
  std::string route;                      // "empty-x" | "short-x" | "reversal"
};

// Bounds ln||M(w)|| using only the prefix envelope, the two-block cut and the
// norm-preserving reversal; raises InternalError if the certified ceiling
// ever falls below the directly computed value.
CertifiedBound certified_bound(double lambda, const Word& w, const ContinuedFraction& cf,
                               const EnergyGrowth& growth,
                               std::uint64_t budget = default_letter_budget);

}  // namespace sturm
