#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Dataset loaders (WBCD, Iris, categorical outage logs), reproducible k-fold
// partitioning, year-based splitting, and a seeded synthetic outage generator.

namespace dsc {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct NumericRecord {
  std::string id;
  std::vector<std::optional<double>> values;
  int label = 0;  // dataset-specific class index
};

// Outage attributes in the order used throughout: CI, WE, SE, TD, PA, PD.
inline constexpr std::size_t kOutageAttributeCount = 6;
inline constexpr std::array<const char*, kOutageAttributeCount> kOutageAttributeNames = {
    "CI", "WE", "SE", "TD", "PA", "PD"};

inline constexpr std::array<const char*, 4> kOutageClasses = {"tree", "animal", "lightning",
                                                              "others"};

struct CategoricalRecord {
  std::string id;
  int year = 0;
  std::array<std::string, kOutageAttributeCount> attributes;
  std::string label;  // one of kOutageClasses
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

// WBCD labels: 0 = normal (benign, class code 2), 1 = abnormal (malignant, 4).
inline constexpr int kWbcdNormal = 0;
inline constexpr int kWbcdAbnormal = 1;
inline constexpr std::size_t kWbcdAttributeCount = 9;

// CSV rows: id, nine integer attributes in [1,10] ("?" = missing), class code.
inline std::vector<NumericRecord> load_wbcd(std::istream& in) {
  std::vector<NumericRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != kWbcdAttributeCount + 2) {
      throw ParseError(lineno, "expected 11 comma-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    NumericRecord rec;
    rec.id = fields[0];
    for (std::size_t a = 0; a < kWbcdAttributeCount; ++a) {
      const std::string& f = fields[a + 1];
      if (f == "?") {
        rec.values.push_back(std::nullopt);
        continue;
      }
      int v;
      try {
        v = std::stoi(f);
      } catch (const std::exception&) {
        throw ParseError(lineno, "attribute " + std::to_string(a + 1) + " is not an integer: " + f);
      }
      if (v < 1 || v > 10) {
        throw ParseError(lineno,
                         "attribute " + std::to_string(a + 1) + " out of range [1,10]: " + f);
      }
      rec.values.push_back(static_cast<double>(v));
    }
    if (fields[10] == "2") {
      rec.label = kWbcdNormal;
    } else if (fields[10] == "4") {
      rec.label = kWbcdAbnormal;
    } else {
      throw ParseError(lineno, "unknown class code: " + fields[10]);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// Iris labels: class indices 1/2/3 in the order Setosa, Versicolour, Virginica.
inline constexpr std::size_t kIrisAttributeCount = 4;

inline std::vector<NumericRecord> load_iris(std::istream& in) {
  std::vector<NumericRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != kIrisAttributeCount + 1) {
      throw ParseError(lineno, "expected 5 comma-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    NumericRecord rec;
    rec.id = std::to_string(lineno);
    for (std::size_t a = 0; a < kIrisAttributeCount; ++a) {
      double v;
      try {
        v = std::stod(fields[a]);
      } catch (const std::exception&) {
        throw ParseError(lineno, "attribute " + std::to_string(a + 1) + " is not numeric: " +
                                     fields[a]);
      }
      if (v <= 0.0) throw ParseError(lineno, "attribute values must be positive");
      rec.values.push_back(v);
    }
    const std::string cls = detail::lower(fields[4]);
    if (cls == "iris-setosa") {
      rec.label = 1;
    } else if (cls == "iris-versicolor" || cls == "iris-versicolour") {
      rec.label = 2;
    } else if (cls == "iris-virginica") {
      rec.label = 3;
    } else {
      throw ParseError(lineno, "unknown class name: " + fields[4]);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// CSV rows: id, year, CI, WE, SE, PD, PA, TD, fault label. Attribute tokens
// are kept verbatim; fault labels outside {tree, animal, lightning} map to
// "others".
inline std::vector<CategoricalRecord> load_outage(std::istream& in) {
  std::vector<CategoricalRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 9) {
      throw ParseError(lineno, "expected 9 comma-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    CategoricalRecord rec;
    rec.id = fields[0];
    try {
      rec.year = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw ParseError(lineno, "year is not an integer: " + fields[1]);
    }
    // File column order is CI, WE, SE, PD, PA, TD; stored as CI, WE, SE, TD, PA, PD.
    const std::array<std::size_t, kOutageAttributeCount> file_to_record = {0, 1, 2, 5, 4, 3};
    for (std::size_t a = 0; a < kOutageAttributeCount; ++a) {
      const std::string& tok = fields[2 + a];
      if (tok.empty()) throw ParseError(lineno, "empty attribute token in column " +
                                                    std::to_string(3 + a));
      rec.attributes[file_to_record[a]] = tok;
    }
    const std::string fault = detail::lower(fields[8]);
    if (fault == "tree" || fault == "animal" || fault == "lightning") {
      rec.label = fault;
    } else {
      rec.label = "others";
    }
    records.push_back(std::move(rec));
  }
  return records;
}

struct FoldPlan {
  std::uint64_t seed = 0;
  std::size_t fold_count = 0;
  std::vector<std::size_t> assignment;  // record index -> fold index

  std::vector<std::size_t> fold_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> complement_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) out.push_back(i);
    }
    return out;
  }
};

// Unstratified uniform shuffle, then round-robin fold assignment, so fold
// sizes differ by at most one. Deterministic for a fixed seed.
inline FoldPlan kfold(std::size_t record_count, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold requires k >= 2");
  if (record_count < k) throw std::invalid_argument("kfold requires at least k records");
  std::vector<std::size_t> order(record_count);
  for (std::size_t i = 0; i < record_count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = record_count - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  FoldPlan plan;
  plan.seed = seed;
  plan.fold_count = k;
  plan.assignment.resize(record_count);
  for (std::size_t pos = 0; pos < record_count; ++pos) {
    plan.assignment[order[pos]] = pos % k;
  }
  return plan;
}

// Records with year <= boundary form the training split; order is preserved.
inline std::pair<std::vector<CategoricalRecord>, std::vector<CategoricalRecord>> split_by_year(
    const std::vector<CategoricalRecord>& records, int boundary) {
  std::vector<CategoricalRecord> train, test;
  for (const auto& rec : records) {
    (rec.year <= boundary ? train : test).push_back(rec);
  }
  return {std::move(train), std::move(test)};
}

// Per-class, per-attribute category distributions driving the synthetic
// outage generator. Every class must specify a distribution for every
// attribute, each summing to 1.
struct SyntheticOutageSpec {
  struct Distribution {
    std::vector<std::pair<std::string, double>> categories;
  };
  // class -> attribute index -> distribution
  std::map<std::string, std::array<Distribution, kOutageAttributeCount>> distributions;
  std::map<std::string, std::size_t> counts;

  void validate() const {
    if (counts.empty()) throw std::invalid_argument("synthetic spec lists no class counts");
    for (const auto& [cls, n] : counts) {
      (void)n;
      auto it = distributions.find(cls);
      if (it == distributions.end()) {
        throw std::invalid_argument("no distributions given for class " + cls);
      }
      for (std::size_t a = 0; a < kOutageAttributeCount; ++a) {
        const auto& dist = it->second[a];
        if (dist.categories.empty()) {
          throw std::invalid_argument("class " + cls + " has no categories for attribute " +
                                      kOutageAttributeNames[a]);
        }
        double total = 0.0;
        for (const auto& [cat, p] : dist.categories) {
          if (p < 0.0) throw std::invalid_argument("negative probability for category " + cat);
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-6) {
          throw std::invalid_argument("class " + cls + " attribute " + kOutageAttributeNames[a] +
                                      " probabilities sum to " + std::to_string(total));
        }
      }
    }
  }
};

// Plain-text spec format, one directive per line ('#' starts a comment):
//   count <class> <n>
//   p <class> <attribute> <category> <probability>
// Attribute names are CI, WE, SE, TD, PA, PD.
inline SyntheticOutageSpec parse_synthetic_spec(std::istream& in) {
  SyntheticOutageSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    if (keyword == "count") {
      std::string cls;
      long long n;
      if (!(ls >> cls >> n) || n < 0) throw ParseError(lineno, "malformed count directive");
      spec.counts[detail::lower(cls)] = static_cast<std::size_t>(n);
    } else if (keyword == "p") {
      std::string cls, attr, cat;
      double prob;
      if (!(ls >> cls >> attr >> cat >> prob)) throw ParseError(lineno, "malformed p directive");
      std::size_t ai = kOutageAttributeCount;
      for (std::size_t a = 0; a < kOutageAttributeCount; ++a) {
        if (attr == kOutageAttributeNames[a]) ai = a;
      }
      if (ai == kOutageAttributeCount) throw ParseError(lineno, "unknown attribute: " + attr);
      spec.distributions[detail::lower(cls)][ai].categories.emplace_back(cat, prob);
    } else {
      throw ParseError(lineno, "unknown directive: " + keyword);
    }
  }
  spec.validate();
  return spec;
}

// Generates records deterministically for a fixed seed. Class counts are met
// exactly; attribute categories are sampled independently per record from the
// spec distributions. Years cycle through 1994..2002 so that split_by_year at
// 1999 yields a 2:1 train/test split.
inline std::vector<CategoricalRecord> generate_synthetic_outage(const SyntheticOutageSpec& spec,
                                                                std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  auto draw = [&rng](const SyntheticOutageSpec::Distribution& dist) -> const std::string& {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (const auto& [cat, p] : dist.categories) {
      acc += p;
      if (u < acc) return cat;
    }
    return dist.categories.back().first;
  };
  std::vector<CategoricalRecord> records;
  std::size_t serial = 0;
  for (const auto& [cls, count] : spec.counts) {
    const auto& dists = spec.distributions.at(cls);
    for (std::size_t i = 0; i < count; ++i) {
      CategoricalRecord rec;
      rec.id = std::to_string(++serial);
      rec.label = cls;
      for (std::size_t a = 0; a < kOutageAttributeCount; ++a) {
        rec.attributes[a] = draw(dists[a]);
      }
      records.push_back(std::move(rec));
    }
  }
  // Interleave classes before assigning years so both splits keep the mix.
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<CategoricalRecord> shuffled;
  shuffled.reserve(records.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    records[order[pos]].year = 1994 + static_cast<int>(pos % 9);
    shuffled.push_back(std::move(records[order[pos]]));
  }
  return shuffled;
}

}  // namespace dsc
