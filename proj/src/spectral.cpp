#include "sturm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sturm/parallel.hpp"

namespace sturm {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(|trace|/2) of M(lambda, E, s_level); <= 0 inside a band.
double trace_log_ratio(double lambda, double E, const ContinuedFraction& cf, int level) {
  SnProductTable table(lambda, Energy{E}, cf);
  return table.at(level).log_abs_trace() - kLn2;
}

// | |trace| - 2 | from the log-ratio, saturating instead of overflowing.
double trace_gap(double g) {
  if (g > 350) return kInf;
  return 2 * std::abs(std::expm1(g));
}

struct EdgeResult {
  double e = 0;
  bool floor_hit = false;
};

// Bisect between an outside point and an inside point until the trace at the
// reported edge is within trace_tol of 2 (or the bracket hits the double
// floor, which sets the warning).
EdgeResult refine_edge(double lambda, const ContinuedFraction& cf, int level, double outside,
                       double inside, double trace_tol) {
  double lo = outside, hi = inside;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = (lo + hi) / 2;
    const double g = trace_log_ratio(lambda, mid, cf, level);
    if (trace_gap(g) <= trace_tol) return {mid, false};
    if (g <= 0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (std::abs(hi - lo) <= 4 * kEps * std::max({1.0, std::abs(lo), std::abs(hi)})) {
      return {hi, true};
    }
  }
  return {hi, true};
}

}  // namespace

SpectrumApprox approximate_spectrum(double lambda, const ContinuedFraction& cf, int level,
                                    double window_lo, double window_hi, double trace_tol,
                                    std::uint64_t grid, int jobs) {
  if (!(window_lo < window_hi)) throw ConfigError("spectrum window must satisfy lo < hi");
  if (grid < 8) throw ConfigError("spectrum grid needs at least 8 points");
  if (!(trace_tol > 0)) throw ConfigError("trace tolerance must be positive");
  if (level < 1) throw ConfigError("spectrum level must be >= 1");
  if (level > cf.depth()) {
    throw ConfigError("spectrum level " + std::to_string(level) + " exceeds stored depth " +
                      std::to_string(cf.depth()));
  }

  SpectrumApprox out;
  out.lambda = lambda;
  out.level = level;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  out.grid = grid;
  out.trace_tol = trace_tol;

  const double step = (window_hi - window_lo) / static_cast<double>(grid - 1);
  std::vector<double> gs(grid);
  std::vector<double> es(grid);
  for (std::uint64_t i = 0; i < grid; ++i) es[i] = window_lo + step * static_cast<double>(i);
  parallel_for(grid, jobs,
               [&](std::uint64_t i) { gs[i] = trace_log_ratio(lambda, es[i], cf, level); });

  // Runs of grid points inside a band, refined outward against neighbours.
  std::vector<Band> bands;
  std::uint64_t i = 0;
  while (i < grid) {
    if (!(gs[i] <= 0)) {
      ++i;
      continue;
    }
    std::uint64_t j = i;
    while (j + 1 < grid && gs[j + 1] <= 0) ++j;
    Band band;
    if (i == 0) {
      band.lo = es[0];  // clipped by the window; trace condition not enforced
    } else {
      const EdgeResult e = refine_edge(lambda, cf, level, es[i - 1], es[i], trace_tol);
      band.lo = e.e;
      out.edge_warning |= e.floor_hit;
    }
    if (j + 1 == grid) {
      band.hi = es[grid - 1];
    } else {
      const EdgeResult e = refine_edge(lambda, cf, level, es[j + 1], es[j], trace_tol);
      band.hi = e.e;
      out.edge_warning |= e.floor_hit;
    }
    if (band.lo > band.hi) band.lo = band.hi = (band.lo + band.hi) / 2;
    bands.push_back(band);
    i = j + 1;
  }

  // A reported gap must contain a witness with |trace| > 2 + tol; otherwise
  // the gap is below resolution (e.g. a band-touching point) and is merged.
  std::vector<Band> merged;
  for (const Band& band : bands) {
    if (!merged.empty()) {
      const Band& last = merged.back();
      bool witness = false;
      const double glo = last.hi, ghi = band.lo;
      // Grid samples strictly inside the gap, plus its midpoint.
      const std::uint64_t first_idx =
          glo <= window_lo ? 0 : static_cast<std::uint64_t>(std::ceil((glo - window_lo) / step));
      for (std::uint64_t k = first_idx; k < grid && es[k] < ghi; ++k) {
        if (es[k] > glo && trace_gap(gs[k]) > trace_tol && gs[k] > 0) {
          witness = true;
          break;
        }
      }
      if (!witness) {
        const double mid = (glo + ghi) / 2;
        const double g = trace_log_ratio(lambda, mid, cf, level);
        witness = g > 0 && trace_gap(g) > trace_tol;
      }
      if (!witness) {
        merged.back().hi = band.hi;
        continue;
      }
    }
    merged.push_back(band);
  }
  out.bands = std::move(merged);
  return out;
}

std::vector<Band> intersect_bands(const SpectrumApprox& a, const SpectrumApprox& b) {
  std::vector<Band> out;
  std::size_t i = 0, j = 0;
  while (i < a.bands.size() && j < b.bands.size()) {
    const Band& x = a.bands[i];
    const Band& y = b.bands[j];
    const double lo = std::max(x.lo, y.lo);
    const double hi = std::min(x.hi, y.hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (x.hi < y.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

std::vector<double> widest_band_midpoints(const SpectrumApprox& spectrum, std::size_t k) {
  std::vector<std::size_t> order(spectrum.bands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spectrum.bands[a].width() > spectrum.bands[b].width();
  });
  std::vector<double> mids;
  for (std::size_t i = 0; i < order.size() && i < k; ++i) {
    mids.push_back(spectrum.bands[order[i]].mid());
  }
  return mids;
}

// ---------------------------------------------------------------------------

namespace {

// Largest level n >= 1 with |s_n| <= max_length within the stored depth.
int top_level_for_length(const ContinuedFraction& cf, std::uint64_t max_length) {
  LengthTable lengths(cf, cf.depth());
  int best = -1;
  for (int n = 1; n <= cf.depth(); ++n) {
    if (lengths.of(n) <= max_length) {
      best = n;
    } else {
      break;
    }
  }
  if (best < 1) {
    throw ConfigError("length cap " + std::to_string(max_length) +
                      " is below |s_1|; nothing to sample");
  }
  return best;
}

}  // namespace

LyapunovEstimate lyapunov_estimate(double lambda, Energy E, const ContinuedFraction& cf,
                                   std::uint64_t max_length, double tol) {
  if (!(tol > 0)) throw ConfigError("tolerance must be positive");
  const int n_max = top_level_for_length(cf, max_length);
  LengthTable lengths(cf, n_max);
  SnProductTable table(lambda, E, cf);

  LyapunovEstimate out;
  out.lambda = lambda;
  out.energy = E;
  out.tol = tol;

  double prev_rate = table.at(0).log_norm() / 1.0;
  double running_inf = kInf;
  for (int n = 1; n <= n_max; ++n) {
    const std::uint64_t len = lengths.of(n).get_ui();
    const double rate = table.at(n).log_norm() / static_cast<double>(len);
    LyapunovSample s;
    s.level = n;
    s.length = len;
    s.rate = rate;
    s.prev_rate = prev_rate;
    s.f_upper = std::max(rate, prev_rate);
    running_inf = std::min(running_inf, s.f_upper);
    s.inf_f = running_inf;
    s.det_error_bound = table.at(n).det_error_bound;
    out.samples.push_back(s);
    prev_rate = rate;
  }
  out.inf_f = running_inf;
  out.gamma = std::max(out.inf_f, 0.0);
  if (!out.samples.empty()) {
    out.certificate_gap = std::abs(out.samples.back().f_upper - out.inf_f);
    out.converged = out.certificate_gap <= tol;
  } else {
    out.certificate_gap = kInf;
    out.converged = false;
  }
  return out;
}

std::vector<PhaseSample> lyapunov_along_phase(double lambda, Energy E,
                                              const ContinuedFraction& cf,
                                              const mpq_class& theta,
                                              std::span<const std::uint64_t> lengths,
                                              std::uint64_t budget) {
  if (lengths.empty()) throw ConfigError("no sample lengths given");
  std::set<std::uint64_t> marks(lengths.begin(), lengths.end());
  if (*marks.begin() == 0) throw ConfigError("sample lengths must be >= 1");
  const std::uint64_t n_max = *marks.rbegin();

  RotationParams params{cf, theta, lambda};
  const Word w = rotation_word(params, 1, static_cast<std::int64_t>(n_max), budget);

  std::vector<PhaseSample> out;
  TransferProduct p = word_product(lambda, E, Word());
  const Mat2c t0 = local_matrix(lambda, E, 0);
  const Mat2c t1 = local_matrix(lambda, E, 1);
  const double drift0 = multiply_drift(t0);
  const double drift1 = multiply_drift(t1);
  std::uint64_t steps = 0;
  for (std::uint64_t i = 0; i < n_max; ++i) {
    if (w.letter(i)) {
      p.m = t1 * p.m;
      p.det_error_bound += drift1;
    } else {
      p.m = t0 * p.m;
      p.det_error_bound += drift0;
    }
    ++steps;
    if (steps % 32 == 0) {
      const double s = p.m.max_abs();
      if (s == 0 || !std::isfinite(s)) {
        throw InternalError("transfer product over/underflowed between renormalizations");
      }
      p.log_scale += std::log(s);
      const double inv = 1 / s;
      p.m.a *= inv;
      p.m.b *= inv;
      p.m.c *= inv;
      p.m.d *= inv;
    }
    if (marks.count(i + 1)) {
      out.push_back({i + 1,
                     (std::log(sigma_max(p.m)) + p.log_scale) / static_cast<double>(i + 1),
                     p.det_error_bound});
    }
  }
  return out;
}

SubadditiveLimit subadditive_limit(const std::function<double(const Word&)>& F,
                                   const ContinuedFraction& cf, std::uint64_t max_length,
                                   double tol, std::uint64_t seed, int spot_checks,
                                   std::uint64_t budget, double slack) {
  if (!(tol > 0)) throw ConfigError("tolerance must be positive");
  const int n_max = top_level_for_length(cf, std::min(max_length, budget));
  SnCache cache(cf, budget);
  LengthTable lengths(cf, n_max);

  // Spot-check subadditivity on random prefix/suffix splits before trusting
  // the limit construction.
  DetRng rng(seed);
  for (int i = 0; i < spot_checks; ++i) {
    const int n = static_cast<int>(rng.range(std::min(2, n_max), n_max));
    const Word& w = cache.at(n);
    if (w.size() < 2) continue;
    const std::uint64_t k = 1 + rng.below(w.size() - 1);
    const double whole = F(w);
    const double parts = F(w.prefix(k)) + F(w.suffix(w.size() - k));
    if (whole > parts + slack * std::max(1.0, std::abs(whole))) {
      throw ConfigError("supplied functional is not subadditive: F(uv) > F(u) + F(v) on a "
                        "split of s_" + std::to_string(n));
    }
  }

  SubadditiveLimit out;
  out.tol = tol;
  double prev_rate = F(cache.at(0)) / 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const std::uint64_t len = lengths.of(n).get_ui();
    const double value = F(cache.at(n));
    SubadditiveSample s;
    s.level = n;
    s.length = len;
    s.value = value;
    s.rate = value / static_cast<double>(len);
    s.f_upper = std::max(s.rate, prev_rate);
    out.samples.push_back(s);
    prev_rate = s.rate;
  }
  out.limit = kInf;
  for (const SubadditiveSample& s : out.samples) out.limit = std::min(out.limit, s.f_upper);
  if (!out.samples.empty()) {
    out.certificate_gap = std::abs(out.samples.back().f_upper - out.limit);
    out.converged = out.certificate_gap <= tol;
  } else {
    out.certificate_gap = kInf;
    out.converged = false;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Log-norm of every prefix of `word` in one incremental pass.
std::vector<double> prefix_lognorm_sweep(double lambda, Energy E, const Word& word) {
  std::vector<double> out(word.size());
  TransferProduct p;
  const Mat2c t0 = local_matrix(lambda, E, 0);
  const Mat2c t1 = local_matrix(lambda, E, 1);
  for (std::uint64_t i = 0; i < word.size(); ++i) {
    p.m = (word.letter(i) ? t1 : t0) * p.m;
    if ((i + 1) % 32 == 0) {
      const double s = p.m.max_abs();
      if (s == 0 || !std::isfinite(s)) {
        throw InternalError("transfer product over/underflowed between renormalizations");
      }
      const double inv = 1 / s;
      p.log_scale += std::log(s);
      p.m.a *= inv;
      p.m.b *= inv;
      p.m.c *= inv;
      p.m.d *= inv;
    }
    out[i] = std::log(sigma_max(p.m)) + p.log_scale;
  }
  return out;
}

// Upper-envelope line y <= intercept + slope * x over the given points:
// slope chosen among the upper-hull edge slopes (clamped to >= 0) minimizing
// the mean residual, intercept lifted until no point violates.
EnvelopeFit upper_hull_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || xs.size() != ys.size()) throw InternalError("envelope fit needs points");
  // Upper convex hull, points already sorted by x ascending.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross >= 0) {
        hull.pop_back();  // b is below the chord a->i: not on the upper hull
      } else {
        break;
      }
    }
    if (!hull.empty() && xs[hull.back()] == xs[i]) {
      if (ys[hull.back()] >= ys[i]) continue;
      hull.pop_back();
    }
    hull.push_back(i);
  }

  double mean_x = 0;
  for (double x : xs) mean_x += x;
  mean_x /= static_cast<double>(xs.size());

  // Mean residual of the touching line with slope m: m * mean_x + max(y - m x)
  // (the max over hull vertices equals the max over all points). Convex in m;
  // scan candidate slopes.
  const auto objective = [&](double m, double& intercept) {
    double best = -kInf;
    for (std::size_t idx : hull) best = std::max(best, ys[idx] - m * xs[idx]);
    intercept = best;
    return m * mean_x + best;
  };
  std::vector<double> candidates = {0.0};
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const double dx = xs[hull[i]] - xs[hull[i - 1]];
    if (dx <= 0) continue;
    const double m = (ys[hull[i]] - ys[hull[i - 1]]) / dx;
    if (m > 0) candidates.push_back(m);
  }
  std::sort(candidates.begin(), candidates.end());
  EnvelopeFit fit;
  double best_obj = kInf;
  for (double m : candidates) {
    double c = 0;
    const double obj = objective(m, c);
    if (obj < best_obj - 1e-15 * std::max(1.0, std::abs(best_obj))) {
      best_obj = obj;
      fit.slope = m;
      fit.intercept = c;
    }
  }
  // Lift the intercept until every point sits at or below the line, with an
  // epsilon cushion so the reported violations stay nonpositive.
  double mv = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mv = std::max(mv, ys[i] - (fit.intercept + fit.slope * xs[i]));
  }
  if (mv > 0) fit.intercept += mv;
  fit.intercept += 4 * kEps * (std::abs(fit.intercept) + fit.slope * std::abs(xs.back()) + 1);
  return fit;
}

double envelope_at(const EnvelopeFit& fit, double log_len) {
  return fit.intercept + fit.slope * log_len;
}

// ln F with F = max(||T(lambda,E,0)||, ||T(lambda,E,1)||, 1).
double local_factor_log(double lambda, Energy E) {
  const double n0 = sigma_max(local_matrix(lambda, E, 0));
  const double n1 = sigma_max(local_matrix(lambda, E, 1));
  return std::log(std::max({n0, n1, 1.0}));
}

// ln(exp(u) + 1), stable for large u.
double log_exp_plus_one(double u) {
  if (u > 40) return u;
  return std::log1p(std::exp(u));
}

std::vector<std::uint64_t> geometric_marks(std::uint64_t max_length) {
  std::set<std::uint64_t> marks;
  for (std::uint64_t l = 1; l < max_length; l *= 2) marks.insert(l);
  marks.insert(max_length);
  return {marks.begin(), marks.end()};
}

std::vector<GrowthPoint> sample_growth_points(double lambda, Energy E, const Word& c,
                                              const std::vector<double>& sweep,
                                              const std::vector<std::uint64_t>& marks,
                                              int windows_per_length, DetRng& rng) {
  const double letter_drift = std::max(multiply_drift(local_matrix(lambda, E, 0)),
                                       multiply_drift(local_matrix(lambda, E, 1)));
  std::vector<GrowthPoint> points;
  for (const std::uint64_t len : marks) {
    points.push_back({len, 0, sweep[len - 1], true, letter_drift * static_cast<double>(len)});
    for (int j = 0; j < windows_per_length; ++j) {
      const std::uint64_t off = rng.below(c.size() - len + 1);
      const TransferProduct p = word_product(lambda, E, c.subword(off, len));
      points.push_back({len, off + 1, p.log_norm(), false, p.det_error_bound});
    }
  }
  return points;
}

double max_point_violation(const EnvelopeFit& fit, const std::vector<GrowthPoint>& points) {
  double mv = -kInf;
  for (const GrowthPoint& p : points) {
    mv = std::max(mv, p.log_norm - envelope_at(fit, std::log(static_cast<double>(p.length))));
  }
  return mv;
}

}  // namespace

GrowthFit growth_fit(double lambda, const ContinuedFraction& cf, std::span<const Energy> energies,
                     std::uint64_t max_length, int windows_per_length, std::uint64_t seed,
                     std::uint64_t budget, int jobs) {
  if (energies.empty()) throw ConfigError("growth fit needs at least one energy");
  if (max_length < 2) throw ConfigError("growth fit needs max length >= 2");
  if (windows_per_length < 0) throw ConfigError("window count must be >= 0");

  GrowthFit out;
  out.lambda = lambda;
  out.max_length = max_length;
  out.windows_per_length = windows_per_length;
  out.seed = seed;

  // Heuristic unboundedness flag: the coefficient running mean keeps growing.
  const std::vector<double> means = bounded_density_profile(cf);
  out.density_warning = means.back() > 2 * means[means.size() / 2];

  const Word c = c_prefix(cf, max_length, budget);
  const std::vector<std::uint64_t> marks = geometric_marks(max_length);

  // Energies are independent tasks; each fills its own slot, and each draws
  // from its own seeded stream, so the output is identical at any job count.
  std::vector<EnergyGrowth> slots(energies.size());
  parallel_for(energies.size(), jobs, [&](std::uint64_t ei) {
    const Energy E = energies[ei];
    EnergyGrowth g;
    g.energy = E;
    g.fitted_length = max_length;
    g.log_f = local_factor_log(lambda, E);

    const std::vector<double> sweep = prefix_lognorm_sweep(lambda, E, c);
    std::vector<double> xs(sweep.size()), ys(sweep.size());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      xs[i] = std::log(static_cast<double>(i + 1));
      ys[i] = sweep[i];
    }
    g.prefix_fit = upper_hull_fit(xs, ys);
    // Every prefix point must sit under its own envelope; anything else is a
    // fit bug, not data.
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (ys[i] > envelope_at(g.prefix_fit, xs[i])) {
        throw InternalError("prefix envelope fails to majorize its own sample");
      }
    }
    g.fit.slope = 2 * g.prefix_fit.slope;
    g.fit.intercept = 2 * g.log_f + log_exp_plus_one(2 * g.prefix_fit.intercept);

    DetRng rng(seed + 0x9e3779b97f4a7c15ULL * (ei + 1));
    g.points = sample_growth_points(lambda, E, c, sweep, marks, windows_per_length, rng);
    g.max_violation = max_point_violation(g.fit, g.points);
    slots[ei] = std::move(g);
  });
  out.energies = std::move(slots);
  return out;
}

double envelope_violation(double lambda, const ContinuedFraction& cf, const EnergyGrowth& growth,
                          std::uint64_t max_length, int windows_per_length, std::uint64_t seed,
                          std::uint64_t budget) {
  const Word c = c_prefix(cf, max_length, budget);
  const std::vector<std::uint64_t> marks = geometric_marks(max_length);
  const std::vector<double> sweep = prefix_lognorm_sweep(lambda, growth.energy, c);
  DetRng rng(seed);
  const std::vector<GrowthPoint> points =
      sample_growth_points(lambda, growth.energy, c, sweep, marks, windows_per_length, rng);
  return max_point_violation(growth.fit, points);
}

// ---------------------------------------------------------------------------

CertifiedBound certified_bound(double lambda, const Word& w, const ContinuedFraction& cf,
                               const EnergyGrowth& growth, std::uint64_t budget) {
  if (w.empty()) throw ConfigError("cannot bound the empty word");
  if (w.size() > growth.fitted_length) {
    throw ConfigError("word of length " + std::to_string(w.size()) +
                      " exceeds the envelope's certified range " +
                      std::to_string(growth.fitted_length));
  }
  const Energy E = growth.energy;

  CertifiedBound out;
  out.direct_log_norm = word_product(lambda, E, w).log_norm();
  out.split = two_block_decomposition(w, cf, budget);
  const Word& x = out.split.left;
  const Word& y = out.split.right;

  // y is a prefix of s_{t+1}, hence of the infinite word: the prefix envelope
  // applies to it directly.
  const double y_bound =
      y.empty() ? 0.0
                : envelope_at(growth.prefix_fit, std::log(static_cast<double>(y.size())));

  double x_bound = 0;
  if (x.empty()) {
    out.route = "empty-x";
  } else if (x.size() <= 2) {
    out.route = "short-x";
    x_bound = static_cast<double>(x.size()) * growth.log_f;
  } else {
    // ||M(x)|| = ||M(x reversed)||, and x reversed is two letters followed by
    // a prefix v of the infinite word (the palindromic core of the level word
    // it is a suffix of).
    out.route = "reversal";
    const Word v = x.reversed().subword(2, x.size() - 2);
    out.reversal_prefix_len = v.size();
    if (c_prefix(cf, v.size(), budget) != v) {
      throw InternalError("reversed suffix core is not a prefix of the infinite word");
    }
    x_bound = 2 * growth.log_f +
              envelope_at(growth.prefix_fit, std::log(static_cast<double>(v.size())));
  }

  out.path_log = x_bound + y_bound;
  out.envelope_log = envelope_at(growth.fit, std::log(static_cast<double>(w.size())));
  out.bound_log = std::min(out.path_log, out.envelope_log);
  if (out.bound_log < out.direct_log_norm - 1e-9 * std::max(1.0, std::abs(out.direct_log_norm))) {
    throw InternalError("certified ceiling fell below the directly computed norm");
  }
  return out;
}

}  // namespace sturm
