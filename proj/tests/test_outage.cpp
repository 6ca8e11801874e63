#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dsc/outage.hpp"
#include "oracle.hpp"

using namespace dsc;
using Catch::Approx;

namespace {

CategoricalRecord make_record(std::array<std::string, kOutageAttributeCount> attrs,
                              std::string label, int year = 1994) {
  CategoricalRecord rec;
  rec.id = "t";
  rec.year = year;
  rec.attributes = std::move(attrs);
  rec.label = std::move(label);
  return rec;
}

// 10 records; category "storm" on WE occurs 10 times, 3 with lightning label.
std::vector<CategoricalRecord> storm_records() {
  std::vector<CategoricalRecord> records;
  for (int i = 0; i < 3; ++i) {
    records.push_back(make_record({"c", "storm", "s", "t", "p", "d"}, "lightning"));
  }
  for (int i = 0; i < 7; ++i) {
    records.push_back(make_record({"c", "storm", "s", "t", "p", "d"}, "tree"));
  }
  return records;
}

outage::LikelihoodTable fixed_table(double base, double likelihood, const std::string& target = "tree") {
  outage::LikelihoodTable table;
  table.target = target;
  table.base_rate = base;
  // a single category "x" on attribute 0 engineered to the wanted likelihood
  outage::LikelihoodTable::CategoryCounts counts;
  counts.total_count = 1000000;
  counts.target_count = static_cast<std::size_t>(likelihood * 1000000.0 + 0.5);
  table.categories[0]["x"] = counts;
  return table;
}

}  // namespace

TEST_CASE("likelihood training counts categories") {
  auto table = outage::train_likelihoods(storm_records(), "lightning");
  CHECK(table.base_rate == Approx(0.3));
  CHECK(table.categories[1].at("storm").likelihood() == Approx(0.3));
  CHECK_THROWS_AS(outage::train_likelihoods({}, "tree"), outage::TrainingError);
}

TEST_CASE("degenerate base rates abort training") {
  CHECK_THROWS_AS(outage::train_likelihoods(storm_records(), "animal"),
                  outage::DegenerateBaseRateError);
  std::vector<CategoricalRecord> all_tree(5, make_record({"c", "w", "s", "t", "p", "d"}, "tree"));
  CHECK_THROWS_AS(outage::train_likelihoods(all_tree, "tree"),
                  outage::DegenerateBaseRateError);
}

TEST_CASE("likelihood mass branches on the sign of the evidence") {
  const std::uint32_t tree_bit = 1u << outage::frame().index("tree");
  const std::uint32_t theta = outage::frame().theta_mask();

  // positive evidence: L_i = 0.3, L_ij = 0.65 -> m({i}) = 0.35/0.7 = 0.5
  auto positive = outage::likelihood_mass(fixed_table(0.3, 0.65), 0, "x");
  CHECK(positive.mass_bits(tree_bit) == Approx(0.5).margin(1e-9));
  CHECK(positive.mass_bits(theta) == Approx(0.5).margin(1e-9));

  // no evidence: L_ij = L_i
  auto vacuous = outage::likelihood_mass(fixed_table(0.3, 0.3), 0, "x");
  CHECK(vacuous.mass_bits(theta) == Approx(1.0));

  // maximal negative evidence: L_ij = 0 -> m(complement) = 1
  auto negative = outage::likelihood_mass(fixed_table(0.3, 0.0), 0, "x");
  CHECK(negative.mass_bits(theta ^ tree_bit) == Approx(1.0));

  // unseen category: no judgement
  auto unseen = outage::likelihood_mass(fixed_table(0.3, 0.65), 0, "never-seen");
  CHECK(unseen.mass_bits(theta) == Approx(1.0));

  // focal sets stay within {target}, complement, theta, and the axioms hold
  for (double lij : {0.0, 0.1, 0.3, 0.5, 0.9, 1.0}) {
    auto m = outage::likelihood_mass(fixed_table(0.3, lij), 0, "x");
    CHECK(validate(m).ok);
    for (const auto& [bits, mass] : m.focal()) {
      CHECK((bits == tree_bit || bits == (theta ^ tree_bit) || bits == theta));
    }
  }
}

TEST_CASE("scaled likelihood mass clamps and reduces to the plain rule") {
  const std::uint32_t tree_bit = 1u << outage::frame().index("tree");
  // alpha = 2 pushes 2 * 0.5 to the clamp boundary
  auto clamped = outage::scaled_likelihood_mass(fixed_table(0.3, 0.65), 0, "x", 2.0, 1.0);
  CHECK(clamped.mass_bits(tree_bit) == Approx(1.0));
  // a larger alpha clamps here just the same
  auto optimum = outage::scaled_likelihood_mass(fixed_table(0.3, 0.65), 0, "x", 2.6, 1.3);
  CHECK(optimum.mass_bits(tree_bit) == Approx(1.0));
  // alpha = beta = 1 is identical to the unscaled rule
  for (double lij : {0.0, 0.2, 0.3, 0.7, 1.0}) {
    auto plain = outage::likelihood_mass(fixed_table(0.3, lij), 0, "x");
    auto scaled = outage::scaled_likelihood_mass(fixed_table(0.3, lij), 0, "x", 1.0, 1.0);
    for (std::uint32_t bits = 1; bits <= outage::frame().theta_mask(); ++bits) {
      CHECK(scaled.mass_bits(bits) == Approx(plain.mass_bits(bits)).margin(1e-12));
    }
  }
  CHECK_THROWS_AS(outage::scaled_likelihood_mass(fixed_table(0.3, 0.5), 0, "x", 0.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(outage::scaled_likelihood_mass(fixed_table(0.3, 0.5), 0, "x", 1.0, 11.0),
                  std::invalid_argument);
}

TEST_CASE("scaled masses are monotone in alpha and beta until the clamp") {
  const std::uint32_t tree_bit = 1u << outage::frame().index("tree");
  const std::uint32_t not_tree = outage::frame().theta_mask() ^ tree_bit;
  double previous = 0.0;
  for (double alpha = 1.0; alpha <= 10.0; alpha += 0.5) {
    const double m = outage::scaled_likelihood_mass(fixed_table(0.3, 0.4), 0, "x", alpha, 1.0)
                         .mass_bits(tree_bit);
    CHECK(m >= previous);
    previous = m;
  }
  previous = 0.0;
  for (double beta = 1.0; beta <= 10.0; beta += 0.5) {
    const double m = outage::scaled_likelihood_mass(fixed_table(0.3, 0.25), 0, "x", 1.0, beta)
                         .mass_bits(not_tree);
    CHECK(m >= previous);
    previous = m;
  }
}

TEST_CASE("binary model combination on two positive attributes") {
  // two attributes each yielding m({i}) = 0.5: combined 0.75 / 0.25 on theta
  outage::LikelihoodTable table = fixed_table(0.3, 0.65);
  table.categories[1]["x"] = table.categories[0]["x"];
  auto rec = make_record({"x", "x", "x", "x", "x", "x"}, "tree");
  auto combined = outage::classify_binary(rec, table, {0, 1});
  const std::uint32_t tree_bit = 1u << outage::frame().index("tree");
  CHECK(combined.mass_bits(tree_bit) == Approx(0.75).margin(1e-9));
  CHECK(combined.mass_bits(outage::frame().theta_mask()) == Approx(0.25).margin(1e-9));
}

TEST_CASE("binary model with conflicting attributes matches the brute-force oracle") {
  // one attribute m({i}) = 0.6, another m(complement) = 0.5 -> K = 0.3
  const auto& f = outage::frame();
  const std::uint32_t tree_bit = 1u << f.index("tree");
  MassFunction positive(f, {{tree_bit, 0.6}, {f.theta_mask(), 0.4}});
  MassFunction negative(f, {{f.theta_mask() ^ tree_bit, 0.5}, {f.theta_mask(), 0.5}});
  auto result = combine(positive, negative);
  CHECK(result.conflict == Approx(0.3).margin(1e-12));
  auto brute = oracle::brute_combine(positive, negative);
  for (std::uint32_t bits = 1; bits <= f.theta_mask(); ++bits) {
    CHECK(result.joint.mass_bits(bits) == Approx(brute.joint[bits]).margin(1e-9));
  }
}

TEST_CASE("all-vacuous attributes yield a vacuous binary output") {
  outage::LikelihoodTable table = fixed_table(0.3, 0.3);
  auto rec = make_record({"x", "x", "x", "x", "x", "x"}, "tree");
  auto combined = outage::classify_binary(rec, table, {0, 1, 2, 3, 4, 5});
  CHECK(combined.mass_bits(outage::frame().theta_mask()) == Approx(1.0));
}

TEST_CASE("selection parsing covers all scenario shorthands") {
  auto all = outage::parse_selection("all");
  CHECK(all.attributes[0].size() == 6);
  auto single = outage::parse_selection("2");
  CHECK(single.attributes[1] == std::vector<std::size_t>{1});
  auto leave_out = outage::parse_selection("-5");
  CHECK(leave_out.attributes[2] == std::vector<std::size_t>{0, 1, 2, 3, 5});
  auto mixed = outage::parse_selection("t:-5;a:-2;l:2");
  CHECK(mixed.attributes[0] == std::vector<std::size_t>{0, 1, 2, 3, 5});
  CHECK(mixed.attributes[1] == std::vector<std::size_t>{0, 2, 3, 4, 5});
  CHECK(mixed.attributes[2] == std::vector<std::size_t>{1});
  auto triple = outage::parse_selection("t:2,4,6;a:1,3,4;l:1,2,5");
  CHECK(triple.attributes[0] == std::vector<std::size_t>{1, 3, 5});
  CHECK_THROWS_AS(outage::parse_selection("7"), std::invalid_argument);
  CHECK_THROWS_AS(outage::parse_selection("t:1;a:2"), std::invalid_argument);
}

TEST_CASE("fused decision follows the strongest singleton belief") {
  std::istringstream spec_text(
      "count tree 300\ncount animal 300\ncount lightning 300\ncount others 300\n"
      "p tree CI t 0.9\np tree CI o 0.1\np tree WE w 1\np tree SE s 1\np tree TD d 1\n"
      "p tree PA p 1\np tree PD q 1\n"
      "p animal CI o 0.9\np animal CI t 0.1\np animal WE a 1\np animal SE s 1\np animal TD d 1\n"
      "p animal PA p 1\np animal PD q 1\n"
      "p lightning CI o 1\np lightning WE l 1\np lightning SE s 1\np lightning TD d 1\n"
      "p lightning PA p 1\np lightning PD q 1\n"
      "p others CI o 1\np others WE w 0.4\np others WE a 0.3\np others WE l 0.3\n"
      "p others SE s 1\np others TD d 1\np others PA p 1\np others PD q 1\n");
  auto records = generate_synthetic_outage(parse_synthetic_spec(spec_text), 11);
  auto model = outage::train(records, outage::parse_selection("all"));

  // strong positive tree evidence wins for tree
  auto tree_rec = make_record({"t", "w", "s", "d", "p", "q"}, "tree");
  CHECK(outage::classify(tree_rec, model).label == "tree");

  // an all-vacuous record ties every class and resolves to others
  outage::Model vac_model = model;
  vac_model.selection = outage::parse_selection("3");  // SE is constant "s" everywhere
  auto tie_rec = make_record({"o", "w", "s", "d", "p", "q"}, "others");
  CHECK(outage::classify(tie_rec, vac_model).label == "others");
}

TEST_CASE("accumulated complement evidence selects others") {
  // all three models emit strong complement masses; the triple intersection
  // is {others}; cross-check the fold against the brute-force oracle
  const auto& f = outage::frame();
  std::vector<MassFunction> outputs;
  for (const char* cls : outage::kModelClasses) {
    const std::uint32_t bit = 1u << f.index(cls);
    outputs.push_back(MassFunction(f, {{f.theta_mask() ^ bit, 0.9}, {f.theta_mask(), 0.1}}));
  }
  auto fused = combine_all(outputs);
  auto brute12 = oracle::brute_combine(outputs[0], outputs[1]);
  MassFunction::Focal intermediate;
  for (std::uint32_t bits = 1; bits <= f.theta_mask(); ++bits) {
    if (brute12.joint[bits] > 0) intermediate.emplace_back(bits, brute12.joint[bits]);
  }
  auto brute = oracle::brute_combine(MassFunction(f, intermediate), outputs[2]);
  const std::uint32_t others_bit = 1u << f.index("others");
  CHECK(fused.joint.mass_bits(others_bit) == Approx(brute.joint[others_bit]).margin(1e-9));
  double best = 0.0;
  std::string best_class;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double b = belief(fused.joint, HypothesisSet(f, 1u << i));
    if (b > best) {
      best = b;
      best_class = f.label(i);
    }
  }
  CHECK(best_class == "others");
}

TEST_CASE("fusion order does not change the decision") {
  std::istringstream spec_text(
      "count tree 200\ncount animal 200\ncount lightning 100\ncount others 500\n"
      "p tree CI a 0.7\np tree CI b 0.3\np tree WE x 0.6\np tree WE y 0.4\np tree SE s1 0.5\n"
      "p tree SE s2 0.5\np tree TD t1 1\np tree PA p1 0.8\np tree PA p2 0.2\np tree PD d1 1\n"
      "p animal CI b 0.8\np animal CI a 0.2\np animal WE y 0.7\np animal WE x 0.3\n"
      "p animal SE s2 0.6\np animal SE s1 0.4\np animal TD t1 1\np animal PA p2 0.7\n"
      "p animal PA p1 0.3\np animal PD d1 1\n"
      "p lightning CI a 0.5\np lightning CI b 0.5\np lightning WE x 0.9\np lightning WE y 0.1\n"
      "p lightning SE s1 0.9\np lightning SE s2 0.1\np lightning TD t1 1\np lightning PA p1 0.5\n"
      "p lightning PA p2 0.5\np lightning PD d1 1\n"
      "p others CI a 0.4\np others CI b 0.6\np others WE x 0.4\np others WE y 0.6\n"
      "p others SE s1 0.3\np others SE s2 0.7\np others TD t1 1\np others PA p1 0.4\n"
      "p others PA p2 0.6\np others PD d1 1\n");
  auto records = generate_synthetic_outage(parse_synthetic_spec(spec_text), 21);
  auto model = outage::train(records, outage::parse_selection("all"));
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& rec = records[i];
    std::vector<MassFunction> outputs;
    for (std::size_t m = 0; m < 3; ++m) {
      outputs.push_back(outage::classify_binary(rec, model.tables[m],
                                                model.selection.attributes[m], 1.0, 1.0));
    }
    auto reference = combine_all(outputs);
    std::swap(outputs[0], outputs[2]);
    auto swapped = combine_all(outputs);
    for (std::uint32_t bits = 1; bits <= outage::frame().theta_mask(); ++bits) {
      CHECK(swapped.joint.mass_bits(bits) ==
            Approx(reference.joint.mass_bits(bits)).margin(1e-9));
    }
  }
}

TEST_CASE("g-mean arithmetic") {
  // TP=80, FN=20, TN=60, FP=40
  std::vector<std::string> truth, predictions;
  for (int i = 0; i < 80; ++i) { truth.push_back("tree"); predictions.push_back("tree"); }
  for (int i = 0; i < 20; ++i) { truth.push_back("tree"); predictions.push_back("others"); }
  for (int i = 0; i < 60; ++i) { truth.push_back("others"); predictions.push_back("others"); }
  for (int i = 0; i < 40; ++i) { truth.push_back("others"); predictions.push_back("tree"); }
  auto result = outage::evaluate_gmean(predictions, truth, "tree");
  CHECK(result.acc_pos == Approx(0.8));
  CHECK(result.acc_neg == Approx(0.6));
  CHECK(result.g_mean == Approx(std::sqrt(0.48)).margin(1e-12));
  CHECK(result.counts.tp + result.counts.tn + result.counts.fp + result.counts.fn ==
        truth.size());

  // perfect predictions
  auto perfect = outage::evaluate_gmean(truth, truth, "tree");
  CHECK(perfect.g_mean == 1.0);

  // all predicted positive: Acc- collapses and so does the g-mean
  std::vector<std::string> all_tree(truth.size(), "tree");
  auto degenerate = outage::evaluate_gmean(all_tree, truth, "tree");
  CHECK(degenerate.acc_neg == 0.0);
  CHECK(degenerate.g_mean == 0.0);

  CHECK_THROWS_AS(outage::evaluate_gmean({}, {}, "tree"), std::invalid_argument);
  // g <= max(Acc+, Acc-)
  CHECK(result.g_mean <= std::max(result.acc_pos, result.acc_neg) + 1e-12);
}

TEST_CASE("combination study runs the default scenario grid") {
  std::istringstream spec_text(
      "count tree 400\ncount animal 300\ncount lightning 200\ncount others 600\n"
      "p tree CI a 0.8\np tree CI b 0.2\np tree WE u 0.5\np tree WE v 0.5\np tree SE s1 0.7\n"
      "p tree SE s2 0.3\np tree TD t1 0.6\np tree TD t2 0.4\np tree PA p1 1\np tree PD d1 1\n"
      "p animal CI b 0.7\np animal CI a 0.3\np animal WE u 0.5\np animal WE v 0.5\n"
      "p animal SE s2 0.8\np animal SE s1 0.2\np animal TD t2 0.7\np animal TD t1 0.3\n"
      "p animal PA p1 1\np animal PD d1 1\n"
      "p lightning CI a 0.5\np lightning CI b 0.5\np lightning WE v 0.9\np lightning WE u 0.1\n"
      "p lightning SE s1 0.5\np lightning SE s2 0.5\np lightning TD t1 0.5\np lightning TD t2 0.5\n"
      "p lightning PA p1 1\np lightning PD d1 1\n"
      "p others CI a 0.5\np others CI b 0.5\np others WE u 0.6\np others WE v 0.4\n"
      "p others SE s1 0.4\np others SE s2 0.6\np others TD t1 0.5\np others TD t2 0.5\n"
      "p others PA p1 1\np others PD d1 1\n");
  auto records = generate_synthetic_outage(parse_synthetic_spec(spec_text), 31);
  auto [train_set, test_set] = split_by_year(records, 1999);
  auto scenarios = outage::default_scenarios();
  CHECK(scenarios.size() == 13);  // all + 6 singles + 6 leave-one-out
  auto results = outage::run_combination_study(train_set, test_set, scenarios);
  REQUIRE(results.size() == scenarios.size());
  // deterministic: same splits give the same numbers
  auto again = outage::run_combination_study(train_set, test_set, scenarios);
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t m = 0; m < 3; ++m) {
      CHECK(results[i].per_class[m].g_mean == again[i].per_class[m].g_mean);
    }
  }
  // report schema
  auto report = outage::to_report(results);
  CHECK(report.columns.front() == "scenario");
  CHECK(report.rows.size() == results.size() * 3);
}
