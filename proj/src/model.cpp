#include "graphon/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "graphon/rng.hpp"

namespace graphon {

namespace {

constexpr double kWeightTolerance = 1e-12;

void check_symmetric_unit(const Matrix& m, const char* what) {
  require(m.rows() == m.cols(), std::string(what) + " must be square");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << what << " entry (" << i << ", " << j << ") = " << v << " is outside [0, 1]";
        throw InvalidArgument(os.str());
      }
      if (v != m(j, i)) {
        std::ostringstream os;
        os << what << " is not symmetric at (" << i << ", " << j << ")";
        throw InvalidArgument(os.str());
      }
    }
  }
}

}  // namespace

StepGraphon::StepGraphon(Vector weights, Matrix values)
    : weights_(std::move(weights)), values_(std::move(values)) {
  require(weights_.size() >= 1, "step graphon needs at least one class");
  require(values_.rows() == weights_.size(), "values must be k x k for k weights");
  require((weights_.array() >= 0.0).all(), "class weights must be nonnegative");
  require(std::abs(weights_.sum() - 1.0) <= kWeightTolerance,
          "class weights must sum to 1");
  check_symmetric_unit(values_, "step graphon values");
  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (Index a = 0; a < weights_.size(); ++a) {
    acc += weights_[a];
    cumulative_[a] = acc;
  }
}

StepGraphon StepGraphon::constant(double p) {
  return StepGraphon(Vector::Ones(1), Matrix::Constant(1, 1, p));
}

Index StepGraphon::class_of(double x) const {
  const auto* begin = cumulative_.data();
  const auto* end = begin + cumulative_.size();
  // First class whose right endpoint exceeds x; intervals are [F(a-1), F(a)).
  const auto* it = std::upper_bound(begin, end, x);
  if (it == end) return classes() - 1;
  return static_cast<Index>(it - begin);
}

StepGraphon StepGraphon::scaled(double rho) const {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  return StepGraphon(weights_, rho * values_);
}

SmoothGraphon::SmoothGraphon(Evaluator evaluator, double holder_alpha,
                             double holder_const, std::string name, int grid)
    : evaluator_(std::move(evaluator)),
      alpha_(holder_alpha),
      holder_const_(holder_const),
      name_(std::move(name)) {
  require(alpha_ > 0.0, "Hoelder exponent must be positive");
  require(holder_const_ >= 0.0, "Hoelder constant must be nonnegative");
  require(grid >= 2, "validation grid needs at least two points");
  const double a = std::min(alpha_, 1.0);
  const auto g = static_cast<Index>(grid);
  Matrix values(g, g);
  Vector power(g);
  for (Index i = 0; i < g; ++i) {
    power[i] = std::pow(static_cast<double>(i) / static_cast<double>(g - 1), a);
  }
  for (Index i = 0; i < g; ++i) {
    for (Index j = 0; j < g; ++j) {
      const double x = static_cast<double>(i) / static_cast<double>(g - 1);
      const double y = static_cast<double>(j) / static_cast<double>(g - 1);
      values(i, j) = evaluator_(x, y);
      require(values(i, j) >= 0.0 && values(i, j) <= 1.0,
              "graphon '" + name_ + "' evaluates outside [0, 1]");
    }
  }
  for (Index i = 0; i < g; ++i) {
    for (Index j = 0; j < i; ++j) {
      require(std::abs(values(i, j) - values(j, i)) <= 1e-12,
              "graphon '" + name_ + "' is not symmetric");
    }
  }
  for (Index i = 0; i < g; ++i) {
    for (Index j = 0; j < g; ++j) {
      for (Index i2 = 0; i2 < g; ++i2) {
        const double px = power[std::abs(i2 - i)];
        for (Index j2 = 0; j2 < g; ++j2) {
          const double bound = holder_const_ * (px + power[std::abs(j2 - j)]);
          if (std::abs(values(i2, j2) - values(i, j)) > bound + 1e-12) {
            throw InvalidArgument("graphon '" + name_ +
                                  "' violates its declared Hoelder bound on the grid");
          }
        }
      }
    }
  }
}

SmoothGraphon SmoothGraphon::constant(double p) {
  return SmoothGraphon([p](double, double) { return p; }, 1.0, 0.0,
                       "constant");
}

SmoothGraphon SmoothGraphon::product() {
  return SmoothGraphon([](double x, double y) { return x * y; }, 1.0, 1.0, "product");
}

SmoothGraphon SmoothGraphon::minimum() {
  return SmoothGraphon([](double x, double y) { return std::min(x, y); }, 1.0, 1.0,
                       "min");
}

SmoothGraphon SmoothGraphon::weierstrass_half(int terms) {
  require(terms >= 1, "weierstrass_half needs at least one term");
  double amplitude = 0.0;
  for (int j = 0; j < terms; ++j) amplitude += std::pow(2.0, -0.5 * j);
  const double scale = 0.5 / amplitude;
  auto g = [terms, scale](double x) {
    double s = 0.0;
    for (int j = 0; j < terms; ++j) {
      s += std::pow(2.0, -0.5 * j) * std::cos(std::ldexp(std::numbers::pi, j) * x);
    }
    return 0.5 + scale * s;
  };
  // |g(x') - g(x)| <= scale (pi + 2) / (1 - 2^{-1/2}) |x' - x|^{1/2}.
  const double m = 0.5 * scale * (std::numbers::pi + 2.0) / (1.0 - std::sqrt(0.5));
  return SmoothGraphon([g](double x, double y) { return 0.5 * (g(x) + g(y)); }, 0.5, m,
                       "weierstrass_half");
}

double evaluate(const Graphon& w, double x, double y) {
  return std::visit([x, y](const auto& g) { return g(x, y); }, w);
}

ProbabilityMatrix::ProbabilityMatrix(Matrix entries) : entries_(std::move(entries)) {
  check_symmetric_unit(entries_, "probability matrix");
  for (Index i = 0; i < entries_.rows(); ++i) {
    require(entries_(i, i) == 0.0, "probability matrix must have a zero diagonal");
  }
}

AdjacencyObservation::AdjacencyObservation(EdgeMatrix edges,
                                           std::optional<Vector> latent_design,
                                           double sparsity)
    : edges_(std::move(edges)),
      latent_design_(std::move(latent_design)),
      sparsity_(sparsity) {
  require(edges_.rows() == edges_.cols(), "adjacency matrix must be square");
  for (Index i = 0; i < edges_.rows(); ++i) {
    require(edges_(i, i) == 0, "adjacency matrix must have a zero diagonal");
    for (Index j = 0; j < i; ++j) {
      require(edges_(i, j) <= 1, "adjacency entries must be 0 or 1");
      require(edges_(i, j) == edges_(j, i), "adjacency matrix must be symmetric");
    }
  }
  if (latent_design_) {
    require(latent_design_->size() == edges_.rows(), "latent design must have length n");
    require((latent_design_->array() >= 0.0).all() && (latent_design_->array() <= 1.0).all(),
            "latent design entries must lie in [0, 1]");
  }
  require(sparsity_ >= 0.0 && sparsity_ <= 1.0, "sparsity must lie in [0, 1]");
}

AdjacencyObservation AdjacencyObservation::from_edge_list(
    Index n, const std::vector<std::pair<Index, Index>>& edges) {
  EdgeMatrix m = EdgeMatrix::Zero(n, n);
  for (const auto& [i, j] : edges) {
    require(i >= 0 && j >= 0 && i < n && j < n, "edge endpoint out of range");
    require(i != j, "self-loops are not allowed");
    m(i, j) = 1;
    m(j, i) = 1;
  }
  return AdjacencyObservation(std::move(m));
}

std::int64_t AdjacencyObservation::edge_count() const {
  std::int64_t count = 0;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = 0; j < i; ++j) count += edges_(i, j);
  }
  return count;
}

double AdjacencyObservation::edge_density() const {
  const auto n = static_cast<double>(size());
  if (size() < 2) return 0.0;
  return 2.0 * static_cast<double>(edge_count()) / (n * (n - 1.0));
}

std::vector<std::pair<Index, Index>> AdjacencyObservation::edge_list() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = 0; j < i; ++j) {
      if (edges_(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

AdjacencyObservation sample_network_sequence(const ProbabilityMatrix& theta,
                                             std::uint64_t seed) {
  const Index n = theta.size();
  CounterRng rng(seed, Stream::kEdges);
  EdgeMatrix edges = EdgeMatrix::Zero(n, n);
  for (Index i = 1; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const std::uint8_t e = rng.bernoulli(theta(i, j)) ? 1 : 0;
      edges(i, j) = e;
      edges(j, i) = e;
    }
  }
  return AdjacencyObservation(std::move(edges));
}

ProbabilityMatrix graphon_probability_matrix(const Graphon& w, double rho,
                                             const Vector& design) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  const Index n = design.size();
  Matrix theta = Matrix::Zero(n, n);
  for (Index i = 1; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const double v = evaluate(w, design[i], design[j]);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << "graphon evaluates to " << v << " at (" << design[i] << ", " << design[j]
           << "), outside [0, 1]";
        throw InvalidArgument(os.str());
      }
      theta(i, j) = rho * v;
      theta(j, i) = theta(i, j);
    }
  }
  return ProbabilityMatrix(std::move(theta));
}

Vector sample_design(Index n, std::uint64_t seed) {
  CounterRng rng(seed, Stream::kDesign);
  Vector design(n);
  for (Index i = 0; i < n; ++i) design[i] = rng.uniform();
  return design;
}

GraphonSample sample_graphon_network(const Graphon& w, double rho, Index n,
                                     std::uint64_t seed) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  require(n >= 2, "n must be at least 2");
  Vector design = sample_design(n, seed);
  ProbabilityMatrix theta = graphon_probability_matrix(w, rho, design);
  AdjacencyObservation sampled = sample_network_sequence(theta, seed);
  return {AdjacencyObservation(sampled.edges(), std::move(design), rho), std::move(theta)};
}

StepGraphon step_from_assignment(const std::vector<double>& breakpoints,
                                 const Matrix& q) {
  require(breakpoints.size() >= 2, "need at least two breakpoints");
  require(breakpoints.front() == 0.0 && breakpoints.back() == 1.0,
          "breakpoints must cover [0, 1]");
  const auto k = static_cast<Index>(breakpoints.size() - 1);
  require(q.rows() == k && q.cols() == k, "q must be k x k for k intervals");
  Vector weights(k);
  for (Index a = 0; a < k; ++a) {
    const double len = breakpoints[a + 1] - breakpoints[a];
    require(len > 0.0, "breakpoints must be strictly increasing");
    weights[a] = len;
  }
  return StepGraphon(std::move(weights), q);
}

std::vector<int> design_labels(const StepGraphon& w, const Vector& design) {
  std::vector<int> labels(design.size());
  for (Index i = 0; i < design.size(); ++i) {
    labels[i] = static_cast<int>(w.class_of(design[i]));
  }
  return labels;
}

}  // namespace graphon
