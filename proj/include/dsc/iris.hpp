#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dsc/dataset.hpp"
#include "dsc/evidence.hpp"
#include "dsc/report.hpp"

// Two-step Iris pipeline: interval-overlap mass assignment per attribute,
// Dempster combination, focal-hypothesis decision, and a feature-selected
// distance rule for records the first step cannot place in a single class.

namespace dsc::iris {

inline constexpr std::size_t kClassCount = 3;
inline constexpr double kSingleClassMass = 0.9;  // remainder goes to theta

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const Frame& frame() {
  static const Frame f{{"Setosa", "Versicolour", "Virginica"}};
  return f;
}

struct ClassBounds {
  // [attribute][class] -> {min, max} over the training values of that class.
  std::array<std::array<std::pair<double, double>, kClassCount>, kIrisAttributeCount> bounds{};
};

struct ClassStats {
  // Per attribute and class: mean and population standard deviation.
  std::array<std::array<double, kClassCount>, kIrisAttributeCount> mean{};
  std::array<std::array<double, kClassCount>, kIrisAttributeCount> sd{};
  // Per attribute and class-subset mask (1..7): sd of the pooled union.
  std::array<std::array<double, 8>, kIrisAttributeCount> union_sd{};
};

namespace detail {

inline double population_sd(const std::vector<double>& values) {
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace detail

inline ClassBounds train_bounds(const std::vector<NumericRecord>& train) {
  ClassBounds model;
  for (std::size_t a = 0; a < kIrisAttributeCount; ++a) {
    for (std::size_t c = 0; c < kClassCount; ++c) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& rec : train) {
        if (static_cast<std::size_t>(rec.label) != c + 1) continue;
        lo = std::min(lo, *rec.values[a]);
        hi = std::max(hi, *rec.values[a]);
      }
      if (lo > hi) {
        throw TrainingError("class " + std::to_string(c + 1) + " has no training records");
      }
      model.bounds[a][c] = {lo, hi};
    }
  }
  return model;
}

inline ClassStats train_stats(const std::vector<NumericRecord>& train) {
  ClassStats stats;
  for (std::size_t a = 0; a < kIrisAttributeCount; ++a) {
    std::array<std::vector<double>, kClassCount> per_class;
    for (const auto& rec : train) {
      per_class[static_cast<std::size_t>(rec.label) - 1].push_back(*rec.values[a]);
    }
    for (std::size_t c = 0; c < kClassCount; ++c) {
      if (per_class[c].empty()) {
        throw TrainingError("class " + std::to_string(c + 1) + " has no training records");
      }
      stats.mean[a][c] = std::accumulate(per_class[c].begin(), per_class[c].end(), 0.0) /
                         static_cast<double>(per_class[c].size());
      stats.sd[a][c] = detail::population_sd(per_class[c]);
    }
    for (std::uint32_t mask = 1; mask < 8; ++mask) {
      std::vector<double> pooled;
      for (std::size_t c = 0; c < kClassCount; ++c) {
        if ((mask >> c) & 1u) {
          pooled.insert(pooled.end(), per_class[c].begin(), per_class[c].end());
        }
      }
      stats.union_sd[a][mask] = detail::population_sd(pooled);
    }
  }
  return stats;
}

struct Model {
  ClassBounds bounds;
  ClassStats stats;
};

inline Model train(const std::vector<NumericRecord>& records) {
  return {train_bounds(records), train_stats(records)};
}

// Candidate set S = classes whose training interval contains v. One class
// gets 0.9/0.1; two classes put 0.9 on their pair; zero or all three
// candidates yield the vacuous mass.
inline MassFunction interval_mass(double v, const ClassBounds& model, std::size_t attribute) {
  std::uint32_t candidates = 0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& [lo, hi] = model.bounds[attribute][c];
    if (v >= lo && v <= hi) candidates |= 1u << c;
  }
  const int n = std::popcount(candidates);
  if (n == 0 || n == 3) return MassFunction::vacuous(frame());
  return MassFunction(frame(), {{candidates, kSingleClassMass},
                                {frame().theta_mask(), 1.0 - kSingleClassMass}});
}

struct Step1Result {
  HypothesisSet winner;
  MassFunction combined;
};

// Combines the four interval masses; the winner is the focal subset with the
// highest combined mass, ties broken toward smaller cardinality and then
// class order.
inline Step1Result classify_step1(const NumericRecord& record, const ClassBounds& model) {
  std::vector<MassFunction> masses;
  for (std::size_t a = 0; a < kIrisAttributeCount; ++a) {
    masses.push_back(interval_mass(*record.values[a], model, a));
  }
  FoldResult folded = combine_all(masses);
  std::uint32_t best_bits = frame().theta_mask();
  double best_mass = -1.0;
  int best_card = static_cast<int>(kClassCount) + 1;
  for (const auto& [bits, mass] : folded.joint.focal()) {
    const int card = std::popcount(bits);
    const bool better = mass > best_mass + kAxiomTol ||
                        (mass > best_mass - kAxiomTol &&
                         (card < best_card || (card == best_card && bits < best_bits)));
    if (better) {
      best_bits = bits;
      best_mass = mass;
      best_card = card;
    }
  }
  return {HypothesisSet(frame(), best_bits), std::move(folded.joint)};
}

// Feature selection value: product of the contested classes' sds over the sd
// of their pooled union. Smaller values mark more discriminative attributes.
inline double fsv(const ClassStats& stats, std::size_t attribute, std::uint32_t classes_mask) {
  if (std::popcount(classes_mask) < 2) {
    throw std::invalid_argument("fsv requires at least two classes");
  }
  const double denom = stats.union_sd[attribute][classes_mask];
  if (denom == 0.0) throw TrainingError("degenerate attribute: pooled union sd is zero");
  double product = 1.0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if ((classes_mask >> c) & 1u) product *= stats.sd[attribute][c];
  }
  return product / denom;
}

// Distance rule over the contested classes: pick the attribute minimizing FSV
// and assign the class whose training mean is nearest; ties go to the lower
// class index.
inline int classify_step2(const NumericRecord& record, const HypothesisSet& winner,
                          const ClassStats& stats) {
  const std::uint32_t mask = winner.bits();
  if (std::popcount(mask) < 2) {
    throw std::invalid_argument("step 2 applies only to non-singleton winners");
  }
  std::size_t best_attr = kIrisAttributeCount;
  double best_fsv = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < kIrisAttributeCount; ++a) {
    if (stats.union_sd[a][mask] == 0.0) continue;
    const double value = fsv(stats, a, mask);
    if (value < best_fsv) {
      best_fsv = value;
      best_attr = a;
    }
  }
  if (best_attr == kIrisAttributeCount) {
    throw TrainingError("all attributes are degenerate for the contested classes");
  }
  int best_class = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (!((mask >> c) & 1u)) continue;
    const double d = std::abs(*record.values[best_attr] - stats.mean[best_attr][c]);
    if (d < best_d) {
      best_d = d;
      best_class = static_cast<int>(c) + 1;
    }
  }
  return best_class;
}

struct Classification {
  int label = 0;
  bool used_step2 = false;
  HypothesisSet step1_winner;
};

// Full pipeline. When two_step_all is set, the distance rule also re-examines
// records the first step already placed in a single class (run over the whole
// frame in that case); off by default.
inline Classification classify(const NumericRecord& record, const Model& model,
                               bool two_step_all = false) {
  Step1Result step1 = classify_step1(record, model.bounds);
  if (step1.winner.is_singleton() && !two_step_all) {
    return {static_cast<int>(std::countr_zero(step1.winner.bits())) + 1, false, step1.winner};
  }
  const HypothesisSet contested =
      step1.winner.is_singleton() ? HypothesisSet::theta(frame()) : step1.winner;
  return {classify_step2(record, contested, model.stats), true, step1.winner};
}

struct BandBreakdown {
  std::string band;           // id range, e.g. "1-50"
  std::size_t correct1 = 0;   // classified correctly at step 1
  std::size_t errors1 = 0;    // misclassified at step 1
  std::size_t split1 = 0;     // passed to step 2
  std::size_t errors2 = 0;    // misclassified at step 2
};

struct RunResult {
  double accuracy = 0.0;
  std::array<BandBreakdown, kClassCount> bands;
};

struct Evaluation {
  std::vector<RunResult> runs;
  double mean_accuracy = 0.0;
};

// Per run: 10-fold cross validation with a fresh fold plan, plus the per-band
// breakdown (bands follow the file order: 1-50, 51-100, 101-150 on the
// canonical dataset).
inline Evaluation evaluate(const std::vector<NumericRecord>& records, std::size_t k,
                           std::uint64_t seed, std::size_t run_count, bool two_step_all = false) {
  if (records.empty()) throw TrainingError("no records to evaluate");
  Evaluation eval;
  const std::size_t band_size = (records.size() + kClassCount - 1) / kClassCount;
  for (std::size_t run = 0; run < run_count; ++run) {
    FoldPlan plan = kfold(records.size(), k, seed + run);
    RunResult result;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      result.bands[c].band = std::to_string(c * band_size + 1) + "-" +
                             std::to_string(std::min((c + 1) * band_size, records.size()));
    }
    std::size_t correct = 0;
    for (std::size_t fold = 0; fold < k; ++fold) {
      std::vector<NumericRecord> train_set;
      for (std::size_t i : plan.complement_indices(fold)) train_set.push_back(records[i]);
      const Model model = train(train_set);
      for (std::size_t i : plan.fold_indices(fold)) {
        const Classification c = classify(records[i], model, two_step_all);
        BandBreakdown& band = result.bands[std::min(i / band_size, kClassCount - 1)];
        const bool ok = c.label == records[i].label;
        if (ok) ++correct;
        if (c.used_step2) {
          ++band.split1;
          if (!ok) ++band.errors2;
        } else if (ok) {
          ++band.correct1;
        } else {
          ++band.errors1;
        }
      }
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(records.size());
    eval.mean_accuracy += result.accuracy;
    eval.runs.push_back(std::move(result));
  }
  eval.mean_accuracy /= static_cast<double>(run_count);
  return eval;
}

inline EvaluationReport to_report(const Evaluation& eval) {
  EvaluationReport report;
  report.columns = {"run",        "c_a",     "id_band", "correct_1st",
                    "errors_1st", "split_1st", "errors_2nd"};
  for (std::size_t r = 0; r < eval.runs.size(); ++r) {
    const RunResult& run = eval.runs[r];
    for (const BandBreakdown& band : run.bands) {
      report.add_row({std::to_string(r + 1), format_rate(run.accuracy), band.band,
                      std::to_string(band.correct1), std::to_string(band.errors1),
                      std::to_string(band.split1), std::to_string(band.errors2)});
    }
  }
  return report;
}

}  // namespace dsc::iris
