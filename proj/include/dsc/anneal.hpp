#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsc/outage.hpp"
#include "dsc/report.hpp"

// Simulated-annealing search over the (alpha, beta) mass-scaling parameters,
// maximizing an objective such as the product of the per-class g-means.

namespace dsc::anneal {

struct AnnealConfig {
  double initial_alpha = 10.0;
  double initial_beta = 10.0;
  double lower_bound = 1.0;
  double upper_bound = 10.0;
  double cooling_factor = 0.99;   // temperature multiplier per iteration
  double initial_temperature = 1.0;
  double step_scale = 1.0;        // proposal sd, shrinks with temperature
  std::size_t budget = 5000;      // objective evaluations
  std::uint64_t seed = 7;

  void validate() const {
    if (cooling_factor <= 0.0 || cooling_factor >= 1.0) {
      throw std::invalid_argument("cooling factor must lie in (0,1)");
    }
    if (budget < 1) throw std::invalid_argument("iteration budget must be at least 1");
    if (lower_bound >= upper_bound) throw std::invalid_argument("invalid parameter bounds");
    for (double v : {initial_alpha, initial_beta}) {
      if (v < lower_bound || v > upper_bound) {
        throw std::invalid_argument("initial point outside the parameter bounds");
      }
    }
  }
};

struct TraceEntry {
  std::size_t iteration = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double objective = 0.0;
  double temperature = 0.0;
  bool accepted = false;
};

struct AnnealResult {
  double best_alpha = 0.0;
  double best_beta = 0.0;
  double best_objective = 0.0;
  std::vector<TraceEntry> trace;
};

class ObjectiveError : public std::runtime_error {
 public:
  explicit ObjectiveError(const std::string& what, std::vector<TraceEntry> trace = {})
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

using Objective = std::function<double(double alpha, double beta)>;

// Metropolis chain: improvements are always accepted, regressions with
// probability exp(delta / T); T cools geometrically each iteration and
// proposals are normal perturbations clamped into the bounds. Deterministic
// for a fixed seed. Aborts if more than half of all proposals fail to
// evaluate.
inline AnnealResult anneal(const AnnealConfig& config, const Objective& objective) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto clamp = [&](double v) {
    return std::clamp(v, config.lower_bound, config.upper_bound);
  };

  AnnealResult result;
  double alpha = config.initial_alpha;
  double beta = config.initial_beta;
  double current = objective(alpha, beta);
  double temperature = config.initial_temperature;
  result.best_alpha = alpha;
  result.best_beta = beta;
  result.best_objective = current;
  result.trace.push_back({0, alpha, beta, current, temperature, true});

  std::size_t failures = 0;
  for (std::size_t it = 1; it < config.budget; ++it) {
    temperature *= config.cooling_factor;
    const double sigma = config.step_scale * std::max(temperature, 0.02);
    const double cand_alpha = clamp(alpha + sigma * gauss(rng));
    const double cand_beta = clamp(beta + sigma * gauss(rng));
    double value;
    try {
      value = objective(cand_alpha, cand_beta);
    } catch (const std::exception& e) {
      if (++failures * 2 > it) {
        throw ObjectiveError("objective failed at more than half of all proposals: " +
                                 std::string(e.what()),
                             std::move(result.trace));
      }
      result.trace.push_back({it, cand_alpha, cand_beta, 0.0, temperature, false});
      continue;
    }
    const double delta = value - current;
    const bool accept =
        delta >= 0.0 ||
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) < std::exp(delta / temperature);
    if (accept) {
      alpha = cand_alpha;
      beta = cand_beta;
      current = value;
      if (value > result.best_objective) {
        result.best_alpha = alpha;
        result.best_beta = beta;
        result.best_objective = value;
      }
    }
    result.trace.push_back({it, cand_alpha, cand_beta, value, temperature, accept});
  }
  return result;
}

// Deterministic alternative schedule: alpha and beta themselves decay
// from their initial values by the cooling factor each iteration, and the
// best point visited on that deterministic scan is returned.
inline AnnealResult decay_scan(const AnnealConfig& config, const Objective& objective) {
  config.validate();
  AnnealResult result;
  double alpha = config.initial_alpha;
  double beta = config.initial_beta;
  result.best_objective = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < config.budget; ++it) {
    if (alpha < config.lower_bound && beta < config.lower_bound) break;
    const double a = std::clamp(alpha, config.lower_bound, config.upper_bound);
    const double b = std::clamp(beta, config.lower_bound, config.upper_bound);
    const double value = objective(a, b);
    const bool improved = value > result.best_objective;
    if (improved) {
      result.best_alpha = a;
      result.best_beta = b;
      result.best_objective = value;
    }
    result.trace.push_back({it, a, b, value, 0.0, improved});
    alpha *= config.cooling_factor;
    beta *= config.cooling_factor;
  }
  return result;
}

// g-mean product objective over a fixed train/test split; evaluations are
// cached per (alpha, beta) rounded to 1e-3 since each one re-runs the full
// test-set classification.
class GmeanProductObjective {
 public:
  GmeanProductObjective(std::vector<CategoricalRecord> train_set,
                        std::vector<CategoricalRecord> test_set,
                        outage::ModelAttributeSelection selection)
      : train_(std::move(train_set)), test_(std::move(test_set)), selection_(std::move(selection)) {}

  double operator()(double alpha, double beta) const {
    const std::pair<long, long> key = {std::lround(alpha * 1000.0), std::lround(beta * 1000.0)};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double product = 0.0;
    try {
      const outage::ScenarioResult r =
          outage::evaluate_selection(train_, test_, "objective", selection_, alpha, beta);
      product = 1.0;
      for (const auto& g : r.per_class) product *= g.g_mean;
    } catch (const TotalConflictError&) {
      // clamped certainties can collide head-on at extreme scales; score such
      // a parameterization as the worst possible product rather than aborting
      product = 0.0;
    }
    cache_.emplace(key, product);
    return product;
  }

 private:
  std::vector<CategoricalRecord> train_;
  std::vector<CategoricalRecord> test_;
  outage::ModelAttributeSelection selection_;
  mutable std::map<std::pair<long, long>, double> cache_;
};

inline EvaluationReport trace_report(const std::vector<TraceEntry>& trace) {
  EvaluationReport report;
  report.columns = {"iteration", "alpha", "beta", "objective", "temperature", "accepted"};
  for (const auto& e : trace) {
    report.add_row({std::to_string(e.iteration), format_rate(e.alpha), format_rate(e.beta),
                    format_rate(e.objective), format_rate(e.temperature),
                    e.accepted ? "1" : "0"});
  }
  return report;
}

}  // namespace dsc::anneal
