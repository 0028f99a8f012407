#include "sturm/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sturm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kRenormStride = 32;
// Forward error model for one factored multiply: a handful of complex
// fused operations per entry, so the determinant of the unit-scale factor
// drifts by at most kDetDriftFactor * eps * max(1, ||T||_F^2) relative per
// applied one-site matrix. The constant is deliberately generous; measured
// drifts sit two orders of magnitude below it.
constexpr double kDetDriftFactor = 64;

}  // namespace

double Mat2c::max_abs() const {
  return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
}

double Mat2c::frobenius_sq() const {
  return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
}

double sigma_max(const Mat2c& m) {
  const double f = m.frobenius_sq();
  const double d = std::abs(m.det());
  const double disc = std::max(f * f - 4 * d * d, 0.0);
  return std::sqrt((f + std::sqrt(disc)) / 2);
}

double sigma_min(const Mat2c& m) {
  const double f = m.frobenius_sq();
  const double d = std::abs(m.det());
  const double disc = std::max(f * f - 4 * d * d, 0.0);
  const double small_sq = (f - std::sqrt(disc)) / 2;
  if (small_sq > 0) return std::sqrt(small_sq);
  // Cancellation-safe fallback: sigma_min = |det| / sigma_max.
  const double big = sigma_max(m);
  return big > 0 ? d / big : 0.0;
}

Mat2c local_matrix(double lambda, Energy E, int letter) {
  return {E - lambda * static_cast<double>(letter), Energy{-1}, Energy{1}, Energy{0}};
}

namespace {

void renormalize(TransferProduct& p) {
  const double s = p.m.max_abs();
  if (s == 0 || !std::isfinite(s)) {
    throw InternalError("transfer product renormalization hit a zero or non-finite scale");
  }
  const double inv = 1 / s;
  p.m.a *= inv;
  p.m.b *= inv;
  p.m.c *= inv;
  p.m.d *= inv;
  p.log_scale += std::log(s);
}

}  // namespace

double TransferProduct::log_norm() const {
  return std::log(sigma_max(m)) + log_scale;
}

double TransferProduct::log_abs_trace() const {
  const double t = std::abs(m.trace());
  if (t == 0) return -std::numeric_limits<double>::infinity();
  return std::log(t) + log_scale;
}

bool TransferProduct::det_measurable() const {
  // The measured residual needs sigma_min(true) = sigma_min(m) e^{log_scale}
  // to survive the round trip through doubles: keep the factored dynamic
  // range well inside exp(+-700) and the unit-scale sigma_min above the
  // accumulated rounding floor.
  return 2 * std::abs(log_scale) < 600 && sigma_min(m) > 1e3 * kEps;
}

double TransferProduct::det_residual() const {
  const Energy dm = m.det();
  if (dm == Energy{0}) return 1;
  // det(true) = det(m) e^{2 log_scale}; compare with 1 in log space.
  const double log_mag = std::log(std::abs(dm)) + 2 * log_scale;
  if (log_mag > 700) return std::numeric_limits<double>::infinity();
  const Energy det_true = std::polar(std::exp(log_mag), std::arg(dm));
  return std::abs(det_true - Energy{1});
}

double multiply_drift(const Mat2c& factor) {
  return kDetDriftFactor * kEps * std::max(1.0, factor.frobenius_sq());
}

TransferProduct word_product(double lambda, Energy E, const Word& w) {
  TransferProduct p;
  const Mat2c t0 = local_matrix(lambda, E, 0);
  const Mat2c t1 = local_matrix(lambda, E, 1);
  const double drift0 = multiply_drift(t0);
  const double drift1 = multiply_drift(t1);
  for (std::uint64_t i = 0; i < w.size(); ++i) {
    if (w.letter(i)) {
      p.m = t1 * p.m;
      p.det_error_bound += drift1;
    } else {
      p.m = t0 * p.m;
      p.det_error_bound += drift0;
    }
    if ((i + 1) % kRenormStride == 0) renormalize(p);
  }
  p.length = w.size();
  renormalize(p);
  return p;
}

TransferProduct reversed_product(double lambda, Energy E, const Word& w) {
  return word_product(lambda, E, w.reversed());
}

namespace {

// Condition number of the unit-scale factor, capped at the level where the
// determinant has no recoverable digits left anyway.
double capped_kappa(const Mat2c& m) {
  const double lo = sigma_min(m);
  const double hi = sigma_max(m);
  if (lo <= hi * kEps) return 1 / kEps;
  return std::min(hi / lo, 1 / kEps);
}

}  // namespace

TransferProduct concat(const TransferProduct& u, const TransferProduct& v) {
  TransferProduct p;
  p.m = v.m * u.m;  // reading order reverses in the matrix product
  p.log_scale = u.log_scale + v.log_scale;
  p.length = u.length + v.length;
  // One block multiply perturbs the product relatively by eps * kappa of
  // whichever factor we attribute the rounding to; take the better one.
  p.det_error_bound = u.det_error_bound + v.det_error_bound +
                      kDetDriftFactor * kEps *
                          std::min(capped_kappa(u.m), capped_kappa(v.m));
  renormalize(p);
  return p;
}

TransferProduct power(const TransferProduct& u, std::uint64_t k) {
  TransferProduct acc;  // identity
  TransferProduct base = u;
  while (k > 0) {
    if (k & 1) acc = concat(acc, base);
    k >>= 1;
    if (k > 0) base = concat(base, base);
  }
  return acc;
}

const TransferProduct& SnProductTable::at(int n) {
  if (n < -1) throw ConfigError("transfer product level must be >= -1");
  if (n > cf_.depth()) {
    throw ConfigError("transfer product level " + std::to_string(n) +
                      " exceeds stored depth " + std::to_string(cf_.depth()));
  }
  if (n >= 1 && !LengthTable(cf_, n).of(n).fits_ulong_p()) {
    throw ResourceError("word length at level " + std::to_string(n) +
                        " overflows 64-bit bookkeeping");
  }
  const std::size_t idx = static_cast<std::size_t>(n + 1);
  if (memo_.size() <= idx) {
    memo_.resize(idx + 1);
    ready_.resize(idx + 1, 0);
  }
  if (ready_[idx]) return memo_[idx];
  TransferProduct result;
  if (n == -1) {
    result = word_product(lambda_, energy_, Word::from_string("1"));
  } else if (n == 0) {
    result = word_product(lambda_, energy_, Word::from_string("0"));
  } else if (n == 1) {
    const TransferProduct zeros = power(at(0), static_cast<std::uint64_t>(cf_.coeff(1)) - 1);
    result = concat(zeros, at(-1));
  } else {
    const TransferProduct run = power(at(n - 1), static_cast<std::uint64_t>(cf_.coeff(n)));
    result = concat(run, at(n - 2));
  }
  memo_[idx] = result;
  ready_[idx] = 1;
  return memo_[idx];
}

TransferProduct sn_product(double lambda, Energy E, const ContinuedFraction& cf, int n) {
  SnProductTable table(lambda, E, cf);
  return table.at(n);
}

}  // namespace sturm
