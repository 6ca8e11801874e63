#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dsc/dataset.hpp"
#include "dsc/evidence.hpp"
#include "dsc/report.hpp"

// One-step WBCD pipeline: modified-median threshold training, sigmoid mass
// functions over {normal, abnormal}, Dempster combination over the selected
// attributes, and accuracy evaluation across attribute scenarios.

namespace dsc::wbcd {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnclassifiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const Frame& frame() {
  static const Frame f{{"normal", "abnormal"}};
  return f;
}

struct ThresholdModel {
  std::array<double, kWbcdAttributeCount> thresholds{};
  double normal_rank_fraction = 0.0;
};

struct AttributeScenario {
  std::string name;
  std::vector<std::size_t> attributes;  // indices 0..8 for A..I
};

// Scenario syntax: "all" or comma-separated attribute letters, e.g. "B,C,F".
inline AttributeScenario parse_scenario(const std::string& text) {
  AttributeScenario scenario{text, {}};
  if (detail::lower(text) == "all") {
    for (std::size_t a = 0; a < kWbcdAttributeCount; ++a) scenario.attributes.push_back(a);
    return scenario;
  }
  for (const std::string& tok : detail::split_csv_line(text)) {
    if (tok.size() != 1 || tok[0] < 'A' || tok[0] > 'I') {
      throw std::invalid_argument("expected attribute letters A..I, got: " + text);
    }
    scenario.attributes.push_back(static_cast<std::size_t>(tok[0] - 'A'));
  }
  if (scenario.attributes.empty()) throw std::invalid_argument("empty attribute scenario");
  return scenario;
}

// The twelve scenarios studied: all attributes, A+D+H, B+C+F, each single.
inline std::vector<AttributeScenario> default_scenarios() {
  std::vector<AttributeScenario> scenarios;
  scenarios.push_back(parse_scenario("all"));
  scenarios.push_back(parse_scenario("A,D,H"));
  scenarios.push_back(parse_scenario("B,C,F"));
  for (char c = 'A'; c <= 'I'; ++c) scenarios.push_back(parse_scenario(std::string(1, c)));
  return scenarios;
}

// Modified-median thresholds: per attribute, the present training values are
// sorted ascending and the value at 1-based rank round(p*n) is taken, where p
// is the normal fraction of the training labels. Missing values are excluded
// from the ordering.
inline ThresholdModel train_thresholds(const std::vector<NumericRecord>& train) {
  if (train.empty()) throw TrainingError("cannot train thresholds on an empty set");
  std::size_t normal = 0;
  for (const auto& rec : train) {
    if (rec.label == kWbcdNormal) ++normal;
  }
  ThresholdModel model;
  model.normal_rank_fraction = static_cast<double>(normal) / static_cast<double>(train.size());
  for (std::size_t a = 0; a < kWbcdAttributeCount; ++a) {
    std::vector<double> values;
    for (const auto& rec : train) {
      if (rec.values[a].has_value()) values.push_back(*rec.values[a]);
    }
    if (values.empty()) {
      throw TrainingError("attribute " + std::string(1, static_cast<char>('A' + a)) +
                          " has no present values");
    }
    std::sort(values.begin(), values.end());
    // 1-based rank, rounding half away from zero, clamped into [1, n].
    auto rank = static_cast<std::size_t>(
        std::llround(model.normal_rank_fraction * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    model.thresholds[a] = values[rank - 1];
  }
  return model;
}

// m(normal) = 1 / (1 + e^(v-t)); the abnormal mass takes the remainder.
inline MassFunction sigmoid_mass(double v, double t) {
  const double normal = 1.0 / (1.0 + std::exp(v - t));
  return MassFunction(frame(), {{0b01u, normal}, {0b10u, 1.0 - normal}});
}

struct Classification {
  int label = kWbcdNormal;
  MassFunction combined;
};

// Combines the sigmoid masses of the present selected attributes. Missing
// attributes are skipped; a tie resolves to normal.
inline Classification classify(const NumericRecord& record, const ThresholdModel& model,
                               const AttributeScenario& scenario) {
  if (scenario.attributes.empty()) throw std::invalid_argument("empty attribute scenario");
  std::vector<MassFunction> masses;
  for (std::size_t a : scenario.attributes) {
    if (record.values[a].has_value()) {
      masses.push_back(sigmoid_mass(*record.values[a], model.thresholds[a]));
    }
  }
  if (masses.empty()) {
    throw UnclassifiableError("record " + record.id + ": all selected attributes are missing");
  }
  FoldResult folded = combine_all(masses);
  const double normal = folded.joint.mass_bits(0b01u);
  const double abnormal = folded.joint.mass_bits(0b10u);
  return {abnormal > normal ? kWbcdAbnormal : kWbcdNormal, std::move(folded.joint)};
}

struct ScenarioResult {
  std::string name;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return static_cast<double>(correct) / static_cast<double>(total); }
};

// k-fold cross validation pooled over all folds; one accuracy per scenario.
// A record whose selected attributes are all missing is scored with the
// default decision (normal), mirroring the tie rule.
inline std::vector<ScenarioResult> evaluate_scenarios(const std::vector<NumericRecord>& records,
                                                      const std::vector<AttributeScenario>& scenarios,
                                                      std::size_t k, std::uint64_t seed) {
  FoldPlan plan = kfold(records.size(), k, seed);
  std::vector<ScenarioResult> results;
  for (const auto& s : scenarios) results.push_back({s.name, 0, records.size()});
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<NumericRecord> train;
    for (std::size_t i : plan.complement_indices(fold)) train.push_back(records[i]);
    const ThresholdModel model = train_thresholds(train);
    for (std::size_t i : plan.fold_indices(fold)) {
      for (std::size_t s = 0; s < scenarios.size(); ++s) {
        int predicted;
        try {
          predicted = classify(records[i], model, scenarios[s]).label;
        } catch (const UnclassifiableError&) {
          predicted = kWbcdNormal;
        }
        if (predicted == records[i].label) ++results[s].correct;
      }
    }
  }
  return results;
}

inline EvaluationReport to_report(const std::vector<ScenarioResult>& results) {
  EvaluationReport report;
  report.columns = {"scenario", "c_a", "n_correct", "n_total"};
  for (const auto& r : results) {
    report.add_row({r.name, format_rate(r.accuracy()), std::to_string(r.correct),
                    std::to_string(r.total)});
  }
  return report;
}

}  // namespace dsc::wbcd
