#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dsc/dataset.hpp"
#include "dsc/evidence.hpp"
#include "dsc/report.hpp"

// Branching outage pipeline: per-class likelihood tables, likelihood-derived
// mass functions (plain and alpha/beta-scaled), three binary Dempster models
// fused over the shared four-class frame, and g-mean evaluation across
// attribute-combination scenarios.

namespace dsc::outage {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateBaseRateError : public TrainingError {
 public:
  using TrainingError::TrainingError;
};

// Total conflict annotated with the binary model in which it occurred.
class ModelConflictError : public TotalConflictError {
 public:
  ModelConflictError(const TotalConflictError& cause, std::string model)
      : TotalConflictError(cause.conflict(), cause.step()), model_(std::move(model)) {}
  const std::string& model() const { return model_; }

 private:
  std::string model_;
};

inline const Frame& frame() {
  static const Frame f{{"tree", "animal", "lightning", "others"}};
  return f;
}

// The three modelled fault classes; "others" accrues mass only through
// complement intersections.
inline constexpr std::array<const char*, 3> kModelClasses = {"tree", "animal", "lightning"};

struct LikelihoodTable {
  std::string target;
  double base_rate = 0.0;  // L_i: target-class fraction of the training data
  struct CategoryCounts {
    std::size_t target_count = 0;  // N_ij
    std::size_t total_count = 0;   // N_j
    double likelihood() const {
      return static_cast<double>(target_count) / static_cast<double>(total_count);
    }
  };
  std::array<std::map<std::string, CategoryCounts>, kOutageAttributeCount> categories;
};

inline LikelihoodTable train_likelihoods(const std::vector<CategoricalRecord>& train,
                                         const std::string& target) {
  if (train.empty()) throw TrainingError("cannot train likelihoods on an empty set");
  LikelihoodTable table;
  table.target = target;
  std::size_t target_total = 0;
  for (const auto& rec : train) {
    const bool is_target = rec.label == target;
    if (is_target) ++target_total;
    for (std::size_t a = 0; a < kOutageAttributeCount; ++a) {
      auto& counts = table.categories[a][rec.attributes[a]];
      ++counts.total_count;
      if (is_target) ++counts.target_count;
    }
  }
  table.base_rate = static_cast<double>(target_total) / static_cast<double>(train.size());
  if (table.base_rate == 0.0 || table.base_rate == 1.0) {
    throw DegenerateBaseRateError("base rate for class " + target + " is " +
                                  std::to_string(table.base_rate));
  }
  return table;
}

namespace detail {

// Shared form of the likelihood mass with the positive branch scaled by alpha
// and the negative branch by beta; alpha = beta = 1 gives the plain rule.
// Scaled evidence is clamped to 1 with the remainder on theta.
inline MassFunction scaled_mass_impl(const LikelihoodTable& table, std::size_t attribute,
                                     const std::string& category, double alpha, double beta) {
  const double base = table.base_rate;
  if (base == 0.0 || base == 1.0) {
    throw DegenerateBaseRateError("base rate for class " + table.target + " is degenerate");
  }
  const auto& cats = table.categories[attribute];
  auto it = cats.find(category);
  if (it == cats.end()) return MassFunction::vacuous(frame());  // unseen: no judgement
  const double likelihood = it->second.likelihood();
  const std::uint32_t target_bit = 1u << frame().index(table.target);
  const std::uint32_t theta = frame().theta_mask();
  if (likelihood > base) {
    const double evidence = std::min(alpha * (likelihood - base) / (1.0 - base), 1.0);
    return MassFunction(frame(), {{target_bit, evidence}, {theta, 1.0 - evidence}});
  }
  if (likelihood < base) {
    const double evidence = std::min(beta * (base - likelihood) / base, 1.0);
    return MassFunction(frame(), {{theta ^ target_bit, evidence}, {theta, 1.0 - evidence}});
  }
  return MassFunction::vacuous(frame());
}

}  // namespace detail

inline MassFunction likelihood_mass(const LikelihoodTable& table, std::size_t attribute,
                                    const std::string& category) {
  return detail::scaled_mass_impl(table, attribute, category, 1.0, 1.0);
}

inline void require_scale(double alpha, double beta) {
  if (alpha < 1.0 || alpha > 10.0 || beta < 1.0 || beta > 10.0) {
    throw std::invalid_argument("alpha and beta must lie in [1,10]");
  }
}

inline MassFunction scaled_likelihood_mass(const LikelihoodTable& table, std::size_t attribute,
                                           const std::string& category, double alpha,
                                           double beta) {
  require_scale(alpha, beta);
  return detail::scaled_mass_impl(table, attribute, category, alpha, beta);
}

// One binary model: fold the scaled masses of the selected attributes. Focal
// sets of the output stay within {target}, its complement, and theta.
inline MassFunction classify_binary(const CategoricalRecord& record, const LikelihoodTable& table,
                                    const std::vector<std::size_t>& attributes, double alpha = 1.0,
                                    double beta = 1.0) {
  if (attributes.empty()) throw std::invalid_argument("empty attribute selection");
  std::vector<MassFunction> masses;
  for (std::size_t a : attributes) {
    masses.push_back(scaled_likelihood_mass(table, a, record.attributes[a], alpha, beta));
  }
  try {
    return combine_all(masses).joint;
  } catch (const TotalConflictError& e) {
    throw ModelConflictError(e, table.target);
  }
}

struct ModelAttributeSelection {
  // Attribute subsets for the tree, animal and lightning models, in order.
  std::array<std::vector<std::size_t>, 3> attributes;
};

// Scenario shorthand ("k" is a 1-based attribute index):
//   "all"            every attribute in all three models
//   "k"              single attribute k in all three models
//   "-k"             all attributes except k in all three models
//   "t:..;a:..;l:.."  per-model selections, each "all", "k", "-k" or "k,k,k"
inline std::vector<std::size_t> parse_attribute_subset(const std::string& text) {
  const std::string t = dsc::detail::lower(text);
  std::vector<std::size_t> all(kOutageAttributeCount);
  for (std::size_t a = 0; a < kOutageAttributeCount; ++a) all[a] = a;
  if (t == "all") return all;
  if (!t.empty() && t[0] == '-') {
    const int k = std::stoi(t.substr(1));
    if (k < 1 || k > static_cast<int>(kOutageAttributeCount)) {
      throw std::invalid_argument("attribute index out of range: " + text);
    }
    all.erase(all.begin() + (k - 1));
    return all;
  }
  std::vector<std::size_t> subset;
  for (const std::string& tok : dsc::detail::split_csv_line(t)) {
    const int k = std::stoi(tok);
    if (k < 1 || k > static_cast<int>(kOutageAttributeCount)) {
      throw std::invalid_argument("attribute index out of range: " + text);
    }
    subset.push_back(static_cast<std::size_t>(k - 1));
  }
  if (subset.empty()) throw std::invalid_argument("empty attribute subset: " + text);
  return subset;
}

inline ModelAttributeSelection parse_selection(const std::string& text) {
  ModelAttributeSelection selection;
  if (text.find(':') == std::string::npos) {
    auto subset = parse_attribute_subset(text);
    selection.attributes = {subset, subset, subset};
    return selection;
  }
  std::map<char, std::vector<std::size_t>> parts;
  std::istringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ';')) {
    const auto colon = piece.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw std::invalid_argument("malformed per-model selection: " + text);
    }
    parts[static_cast<char>(std::tolower(piece[0]))] = parse_attribute_subset(piece.substr(colon + 1));
  }
  const std::array<char, 3> keys = {'t', 'a', 'l'};
  for (std::size_t m = 0; m < 3; ++m) {
    auto it = parts.find(keys[m]);
    if (it == parts.end()) {
      throw std::invalid_argument("selection missing model '" + std::string(1, keys[m]) +
                                  "': " + text);
    }
    selection.attributes[m] = it->second;
  }
  return selection;
}

struct Model {
  std::array<LikelihoodTable, 3> tables;  // tree, animal, lightning
  ModelAttributeSelection selection;
  double alpha = 1.0;
  double beta = 1.0;
};

inline Model train(const std::vector<CategoricalRecord>& records,
                   const ModelAttributeSelection& selection, double alpha = 1.0,
                   double beta = 1.0) {
  require_scale(alpha, beta);
  Model model;
  for (std::size_t m = 0; m < 3; ++m) {
    model.tables[m] = train_likelihoods(records, kModelClasses[m]);
  }
  model.selection = selection;
  model.alpha = alpha;
  model.beta = beta;
  return model;
}

struct Classification {
  std::string label;
  MassFunction fused;
};

// Fuses the three binary model outputs and takes the class with the highest
// singleton belief; ties resolve to "others", which is also where the
// complement masses of the three models intersect.
inline Classification classify(const CategoricalRecord& record, const Model& model) {
  std::vector<MassFunction> outputs;
  for (std::size_t m = 0; m < 3; ++m) {
    outputs.push_back(classify_binary(record, model.tables[m], model.selection.attributes[m],
                                      model.alpha, model.beta));
  }
  FoldResult fused = combine_all(outputs);
  std::string best = "others";
  double best_belief = belief(fused.joint, HypothesisSet::singleton(frame(), "others"));
  for (const char* cls : kModelClasses) {
    const double b = belief(fused.joint, HypothesisSet::singleton(frame(), cls));
    if (b > best_belief + kAxiomTol) {
      best_belief = b;
      best = cls;
    }
  }
  return {std::move(best), std::move(fused.joint)};
}

struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

struct GmeanResult {
  double g_mean = 0.0;
  double acc_pos = 0.0;
  double acc_neg = 0.0;
  ConfusionCounts counts;
};

// One-vs-rest confusion for the given class; zero denominators yield rate 0.
inline GmeanResult evaluate_gmean(const std::vector<std::string>& predictions,
                                  const std::vector<std::string>& truth,
                                  const std::string& cls) {
  if (predictions.empty() || predictions.size() != truth.size()) {
    throw std::invalid_argument("predictions and truth must be equal-length and non-empty");
  }
  GmeanResult result;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool predicted = predictions[i] == cls;
    const bool actual = truth[i] == cls;
    if (actual) {
      (predicted ? result.counts.tp : result.counts.fn)++;
    } else {
      (predicted ? result.counts.fp : result.counts.tn)++;
    }
  }
  const auto& c = result.counts;
  result.acc_pos = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  result.acc_neg = (c.tn + c.fp) ? static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp) : 0.0;
  result.g_mean = std::sqrt(result.acc_pos * result.acc_neg);
  return result;
}

struct ScenarioResult {
  std::string scenario;
  std::array<GmeanResult, 3> per_class;  // tree, animal, lightning
};

inline ScenarioResult evaluate_selection(const std::vector<CategoricalRecord>& train_set,
                                         const std::vector<CategoricalRecord>& test_set,
                                         const std::string& scenario_label,
                                         const ModelAttributeSelection& selection, double alpha,
                                         double beta) {
  if (train_set.empty()) throw TrainingError("empty training split");
  if (test_set.empty()) throw TrainingError("empty test split");
  const Model model = train(train_set, selection, alpha, beta);
  std::vector<std::string> predictions, truth;
  predictions.reserve(test_set.size());
  for (const auto& rec : test_set) {
    predictions.push_back(classify(rec, model).label);
    truth.push_back(rec.label);
  }
  ScenarioResult result;
  result.scenario = scenario_label;
  for (std::size_t m = 0; m < 3; ++m) {
    result.per_class[m] = evaluate_gmean(predictions, truth, kModelClasses[m]);
  }
  return result;
}

// The study layout: all six attributes, each single, leave-one-out, plus any
// extra (possibly per-model) scenarios.
inline std::vector<std::string> default_scenarios() {
  std::vector<std::string> scenarios = {"all"};
  for (std::size_t a = 1; a <= kOutageAttributeCount; ++a) {
    scenarios.push_back(std::to_string(a));
  }
  for (std::size_t a = 1; a <= kOutageAttributeCount; ++a) {
    scenarios.push_back("-" + std::to_string(a));
  }
  return scenarios;
}

inline std::vector<ScenarioResult> run_combination_study(
    const std::vector<CategoricalRecord>& train_set,
    const std::vector<CategoricalRecord>& test_set, const std::vector<std::string>& scenarios,
    double alpha = 1.0, double beta = 1.0) {
  std::vector<ScenarioResult> results;
  for (const std::string& label : scenarios) {
    results.push_back(
        evaluate_selection(train_set, test_set, label, parse_selection(label), alpha, beta));
  }
  return results;
}

inline EvaluationReport to_report(const std::vector<ScenarioResult>& results) {
  EvaluationReport report;
  report.columns = {"scenario", "class", "g_mean", "acc_pos", "acc_neg", "tp", "tn", "fp", "fn"};
  for (const auto& r : results) {
    for (std::size_t m = 0; m < 3; ++m) {
      const GmeanResult& g = r.per_class[m];
      report.add_row({r.scenario, kModelClasses[m], format_rate(g.g_mean), format_rate(g.acc_pos),
                      format_rate(g.acc_neg), std::to_string(g.counts.tp),
                      std::to_string(g.counts.tn), std::to_string(g.counts.fp),
                      std::to_string(g.counts.fn)});
    }
  }
  return report;
}

}  // namespace dsc::outage
