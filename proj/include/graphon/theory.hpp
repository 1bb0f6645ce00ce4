#pragma once

#include <optional>
#include <string>

#include "graphon/common.hpp"

namespace graphon {

struct RateInputs {
  Index n = 2;
  Index k = 1;
  double rho = 1.0;
  std::optional<double> alpha;
  std::optional<double> r;

  /// Checks n >= 2, 1 <= k <= n and 0 < rho <= 1.
  void validate() const;
};

/// min(rho (ln k / n + k^2 / n^2), rho^2).
double sbm_minimax_rate(const RateInputs& in);

/// min(rho (k^2 / n^2 + ln k / n) + rho^2 sqrt(k / n), rho^2).
double graphon_minimax_rate(const RateInputs& in);

enum class SparsityRegime { kWeak, kModerate, kHigh };

std::string to_string(SparsityRegime regime);

/// Weak if rho >= max(ln k / sqrt(k n), (k/n)^{3/2}), else high if
/// rho <= max(ln k / n, (k/n)^2), else moderate. Needs k >= 2.
SparsityRegime sparsity_regime(const RateInputs& in);

struct SmoothRates {
  double matrix_rate;
  double graphon_rate;
  Index k_star;
};

/// Rates for alpha-Hoelder graphons with a' = min(alpha, 1):
/// k* = ceil((sqrt(rho) n)^{1/(1+a')}),
/// matrix = rho^{(2+a')/(1+a')} n^{-2a'/(1+a')} + rho ln n / n,
/// graphon = matrix + rho^2 / n^{a'}.
SmoothRates smooth_rates(const RateInputs& in);

/// sqrt(2 t sum_var) + 2 m_bound t / 3; a sum of centred variables bounded
/// by m_bound exceeds it with probability at most e^{-t}.
double bernstein_threshold(double sum_var, double m_bound, double t);

struct KlCheck {
  double kl;
  double bound;
  bool holds;
};

/// KL(Bernoulli(rho q) || Bernoulli(rho p)) against (16/3) rho (q - p)^2,
/// for 1/4 < p, q < 3/4 and 0 < rho <= 1.
KlCheck kl_bernoulli_scaled(double p, double q, double rho);

/// E (X_(i) - X_(i+s))^2 = s (s + 1) / ((n + 1)(n + 2)) for uniform order
/// statistics; 0 <= s < n.
double order_stat_gap_moment(Index n, Index s);

/// E|X - n p| for X ~ Binomial(n, p) (De Moivre's closed form).
double binomial_mad(Index n, double p);

/// E sum_a |lambda_a - lambda_hat_a| when lambda_hat are the frequencies of
/// n multinomial(lambda) draws.
double expected_frequency_l1(Index n, const Vector& weights);

}  // namespace graphon
