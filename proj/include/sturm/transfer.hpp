#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sturm/continued_fraction.hpp"
#include "sturm/word.hpp"

namespace sturm {

using Energy = std::complex<double>;

// Dense 2x2 complex matrix, row-major [[a, b], [c, d]].
struct Mat2c {
  Energy a{0}, b{0}, c{0}, d{0};

  static Mat2c identity() { return {1, 0, 0, 1}; }
  Mat2c operator*(const Mat2c& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Energy trace() const { return a + d; }
  Energy det() const { return a * d - b * c; }
  double max_abs() const;
  double frobenius_sq() const;
};

// Largest/smallest singular values via the closed-form 2x2 SVD.
double sigma_max(const Mat2c& m);
double sigma_min(const Mat2c& m);

// One-site matrix [[E - lambda*letter, -1], [1, 0]]; determinant is exactly 1.
Mat2c local_matrix(double lambda, Energy E, int letter);

// Relative determinant-drift budget charged for one multiply by `factor`.
double multiply_drift(const Mat2c& factor);

// Product of one-site matrices in factored form: the true matrix is
// m * exp(log_scale). Entries of m are kept near unit magnitude by periodic
// renormalization so products of ~10^7 factors stay representable.
struct TransferProduct {
  Mat2c m = Mat2c::identity();
  double log_scale = 0;
  std::uint64_t length = 0;
  // Analytic bound on |det(true matrix) - 1| accumulated per multiply; the
  // measured determinant drift is only meaningful while sigma_min stays
  // representable, this bound is maintained regardless.
  double det_error_bound = 0;

  // ln of the spectral norm of the true matrix.
  double log_norm() const;
  // ln |trace| of the true matrix (-inf when the trace vanishes).
  double log_abs_trace() const;
  // Measured |det * e^{2 log_scale} - 1|; saturates instead of overflowing.
  double det_residual() const;
  // True sigma_min is representable (and the residual meaningful) only while
  // the dynamic range fits comfortably in double precision.
  bool det_measurable() const;
};

// Matrix of the word read right-to-left: M(w) = T(w_k) ... T(w_1), built with
// renormalization every 32 multiplies.
TransferProduct word_product(double lambda, Energy E, const Word& w);

// M(w) for the letterwise-reversed word, computed directly.
TransferProduct reversed_product(double lambda, Energy E, const Word& w);

// Product for the concatenation uv given products for u and v.
TransferProduct concat(const TransferProduct& u, const TransferProduct& v);
// k-th power (product for u repeated k times) by binary exponentiation.
TransferProduct power(const TransferProduct& u, std::uint64_t k);

// Memoized M(s_n) via the word recursion: M(s_1) = M(s_{-1}) M(s_0)^{a_1 - 1},
// M(s_n) = M(s_{n-2}) M(s_{n-1})^{a_n}.
class SnProductTable {
 public:
  SnProductTable(double lambda, Energy E, const ContinuedFraction& cf)
      : lambda_(lambda), energy_(E), cf_(cf) {}

  const TransferProduct& at(int n);  // n in [-1, depth]
  double lambda() const { return lambda_; }
  Energy energy() const { return energy_; }
  const ContinuedFraction& cf() const { return cf_; }

 private:
  double lambda_;
  Energy energy_;
  ContinuedFraction cf_;
  std::vector<TransferProduct> memo_;  // memo_[n + 1] = M(s_n)
  std::vector<char> ready_;
};

TransferProduct sn_product(double lambda, Energy E, const ContinuedFraction& cf, int n);

}  // namespace sturm
