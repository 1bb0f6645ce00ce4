#include "graphon/theory.hpp"

#include <algorithm>
#include <cmath>

namespace graphon {

namespace {

double ratio(Index a, Index b) { return static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

void RateInputs::validate() const {
  require(n >= 2, "n must be at least 2");
  require(k >= 1 && k <= n, "k must lie in [1, n]");
  require(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
}

double sbm_minimax_rate(const RateInputs& in) {
  in.validate();
  const double kn = ratio(in.k, in.n);
  const double estimation = in.rho * (std::log(static_cast<double>(in.k)) / static_cast<double>(in.n) + kn * kn);
  return std::min(estimation, in.rho * in.rho);
}

double graphon_minimax_rate(const RateInputs& in) {
  in.validate();
  const double kn = ratio(in.k, in.n);
  const double value = in.rho * (kn * kn + std::log(static_cast<double>(in.k)) / static_cast<double>(in.n)) +
                       in.rho * in.rho * std::sqrt(kn);
  return std::min(value, in.rho * in.rho);
}

std::string to_string(SparsityRegime regime) {
  switch (regime) {
    case SparsityRegime::kWeak: return "weak";
    case SparsityRegime::kModerate: return "moderate";
    case SparsityRegime::kHigh: return "high";
  }
  return "unknown";
}

SparsityRegime sparsity_regime(const RateInputs& in) {
  in.validate();
  require(in.k >= 2, "sparsity regimes need k >= 2");
  const double n = static_cast<double>(in.n);
  const double k = static_cast<double>(in.k);
  const double kn = k / n;
  const double weak = std::max(std::log(k) / std::sqrt(k * n), std::pow(kn, 1.5));
  const double high = std::max(std::log(k) / n, kn * kn);
  if (in.rho >= weak) return SparsityRegime::kWeak;
  if (in.rho <= high) return SparsityRegime::kHigh;
  return SparsityRegime::kModerate;
}

SmoothRates smooth_rates(const RateInputs& in) {
  in.validate();
  require(in.alpha.has_value(), "smooth rates need alpha");
  require(*in.alpha > 0.0, "alpha must be positive");
  const double a = std::min(*in.alpha, 1.0);
  const double n = static_cast<double>(in.n);
  const double rho = in.rho;
  const auto k_star = static_cast<Index>(std::ceil(std::pow(std::sqrt(rho) * n, 1.0 / (1.0 + a))));
  const double matrix = std::pow(rho, (2.0 + a) / (1.0 + a)) * std::pow(n, -2.0 * a / (1.0 + a)) +
                        rho * std::log(n) / n;
  return {matrix, matrix + rho * rho / std::pow(n, a), k_star};
}

double bernstein_threshold(double sum_var, double m_bound, double t) {
  require(sum_var >= 0.0 && m_bound >= 0.0 && t >= 0.0,
          "Bernstein threshold needs nonnegative inputs");
  return std::sqrt(2.0 * t * sum_var) + 2.0 * m_bound * t / 3.0;
}

KlCheck kl_bernoulli_scaled(double p, double q, double rho) {
  require(p > 0.25 && p < 0.75 && q > 0.25 && q < 0.75, "p and q must lie in (1/4, 3/4)");
  require(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
  const double rp = rho * p;
  const double rq = rho * q;
  const double kl = rq * std::log(q / p) + (1.0 - rq) * std::log((1.0 - rq) / (1.0 - rp));
  const double bound = 16.0 / 3.0 * rho * (q - p) * (q - p);
  return {kl, bound, kl <= bound + 1e-12};
}

double order_stat_gap_moment(Index n, Index s) {
  require(s >= 0 && s < n, "s must lie in [0, n)");
  const double sd = static_cast<double>(s);
  const double nd = static_cast<double>(n);
  return sd * (sd + 1.0) / ((nd + 1.0) * (nd + 2.0));
}

double binomial_mad(Index n, double p) {
  require(n >= 0, "n must be nonnegative");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  if (n == 0 || p == 0.0 || p == 1.0) return 0.0;
  const double nd = static_cast<double>(n);
  const auto m = static_cast<Index>(std::floor(nd * p));
  if (m >= n) return 0.0;
  const double md = static_cast<double>(m);
  const double log_choose = std::lgamma(nd + 1.0) - std::lgamma(md + 2.0) - std::lgamma(nd - md);
  const double log_term = log_choose + (md + 1.0) * std::log(p) + (nd - md) * std::log1p(-p);
  return 2.0 * (md + 1.0) * std::exp(log_term);
}

double expected_frequency_l1(Index n, const Vector& weights) {
  require(n >= 1, "n must be positive");
  double total = 0.0;
  for (Index a = 0; a < weights.size(); ++a) total += binomial_mad(n, weights[a]);
  return total / static_cast<double>(n);
}

}  // namespace graphon
