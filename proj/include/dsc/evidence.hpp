#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Core evidence algebra: frames of discernment, hypothesis subsets encoded as
// bitmasks, mass functions over focal subsets, belief/plausibility, and
// Dempster's rule of combination with conflict measurement.

namespace dsc {

// Tolerance for the mass axioms and the bel/pl duality checks.
inline constexpr double kAxiomTol = 1e-9;
// Conflict at or above 1 - kTotalConflictTol is treated as total conflict.
inline constexpr double kTotalConflictTol = 1e-12;
// Power-set enumeration bound; frames in practice have 2-4 labels.
inline constexpr std::size_t kMaxFrameSize = 16;

class FrameMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TotalConflictError : public std::runtime_error {
 public:
  explicit TotalConflictError(double conflict, std::size_t step = 0)
      : std::runtime_error("total conflict (K = " + std::to_string(conflict) +
                           ") at combination step " + std::to_string(step)),
        conflict_(conflict),
        step_(step) {}
  double conflict() const { return conflict_; }
  std::size_t step() const { return step_; }

 private:
  double conflict_;
  std::size_t step_;
};

// A finite set of mutually exclusive hypothesis labels. Cheap to copy; two
// frames compare equal iff their label sequences are identical.
class Frame {
 public:
  explicit Frame(std::vector<std::string> labels)
      : labels_(std::make_shared<const std::vector<std::string>>(std::move(labels))) {
    if (labels_->empty() || labels_->size() > kMaxFrameSize) {
      throw std::invalid_argument("frame must have between 1 and " +
                                  std::to_string(kMaxFrameSize) + " labels");
    }
    for (std::size_t i = 0; i < labels_->size(); ++i) {
      if ((*labels_)[i].empty()) {
        throw std::invalid_argument("frame labels must be non-empty");
      }
      for (std::size_t j = i + 1; j < labels_->size(); ++j) {
        if ((*labels_)[i] == (*labels_)[j]) {
          throw std::invalid_argument("duplicate frame label: " + (*labels_)[i]);
        }
      }
    }
  }

  std::size_t size() const { return labels_->size(); }
  const std::string& label(std::size_t i) const { return labels_->at(i); }

  std::size_t index(std::string_view label) const {
    for (std::size_t i = 0; i < labels_->size(); ++i) {
      if ((*labels_)[i] == label) return i;
    }
    throw std::invalid_argument("label not in frame: " + std::string(label));
  }

  std::uint32_t theta_mask() const {
    return static_cast<std::uint32_t>((1u << labels_->size()) - 1u);
  }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.labels_ == b.labels_ || *a.labels_ == *b.labels_;
  }
  friend bool operator!=(const Frame& a, const Frame& b) { return !(a == b); }

 private:
  std::shared_ptr<const std::vector<std::string>> labels_;
};

// A subset of a frame, stored as a bitmask over label indices.
class HypothesisSet {
 public:
  HypothesisSet(Frame frame, std::uint32_t bits) : frame_(std::move(frame)), bits_(bits) {
    if (bits_ > frame_.theta_mask()) {
      throw std::invalid_argument("subset mask exceeds the frame's power set");
    }
  }

  static HypothesisSet empty_set(const Frame& f) { return {f, 0u}; }
  static HypothesisSet theta(const Frame& f) { return {f, f.theta_mask()}; }
  static HypothesisSet singleton(const Frame& f, std::string_view label) {
    return {f, static_cast<std::uint32_t>(1u << f.index(label))};
  }
  static HypothesisSet of(const Frame& f, std::initializer_list<std::string_view> labels) {
    std::uint32_t bits = 0;
    for (auto l : labels) bits |= 1u << f.index(l);
    return {f, bits};
  }

  const Frame& frame() const { return frame_; }
  std::uint32_t bits() const { return bits_; }
  bool empty() const { return bits_ == 0; }
  bool is_theta() const { return bits_ == frame_.theta_mask(); }
  int cardinality() const { return std::popcount(bits_); }
  bool is_singleton() const { return cardinality() == 1; }

  HypothesisSet complement() const { return {frame_, bits_ ^ frame_.theta_mask()}; }
  HypothesisSet intersect(const HypothesisSet& o) const {
    require_same_frame(o);
    return {frame_, bits_ & o.bits_};
  }
  HypothesisSet unite(const HypothesisSet& o) const {
    require_same_frame(o);
    return {frame_, bits_ | o.bits_};
  }
  bool subset_of(const HypothesisSet& o) const {
    require_same_frame(o);
    return (bits_ & ~o.bits_) == 0;
  }
  bool intersects(const HypothesisSet& o) const {
    require_same_frame(o);
    return (bits_ & o.bits_) != 0;
  }
  bool contains(std::string_view label) const {
    return (bits_ >> frame_.index(label)) & 1u;
  }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < frame_.size(); ++i) {
      if ((bits_ >> i) & 1u) {
        if (!first) out += ",";
        out += frame_.label(i);
        first = false;
      }
    }
    out += "}";
    return out;
  }

  friend bool operator==(const HypothesisSet& a, const HypothesisSet& b) {
    return a.frame_ == b.frame_ && a.bits_ == b.bits_;
  }

 private:
  void require_same_frame(const HypothesisSet& o) const {
    if (frame_ != o.frame_) throw FrameMismatchError("hypothesis sets belong to different frames");
  }

  Frame frame_;
  std::uint32_t bits_;
};

// A basic probability assignment over a frame. Only focal (nonzero-mass)
// subsets are stored, sorted by bitmask. Construction drops exact zeros but
// does not enforce the axioms; see validate().
class MassFunction {
 public:
  using Focal = std::vector<std::pair<std::uint32_t, double>>;

  MassFunction(Frame frame, Focal focal) : frame_(std::move(frame)) {
    std::sort(focal.begin(), focal.end());
    for (auto& [bits, mass] : focal) {
      if (bits > frame_.theta_mask()) {
        throw std::invalid_argument("focal subset mask exceeds the frame's power set");
      }
      if (mass == 0.0) continue;
      if (!focal_.empty() && focal_.back().first == bits) {
        focal_.back().second += mass;
      } else {
        focal_.emplace_back(bits, mass);
      }
    }
  }

  static MassFunction vacuous(const Frame& f) {
    return MassFunction(f, {{f.theta_mask(), 1.0}});
  }

  const Frame& frame() const { return frame_; }
  const Focal& focal() const { return focal_; }

  double mass_bits(std::uint32_t bits) const {
    auto it = std::lower_bound(focal_.begin(), focal_.end(), bits,
                               [](const auto& p, std::uint32_t b) { return p.first < b; });
    return (it != focal_.end() && it->first == bits) ? it->second : 0.0;
  }

  double mass(const HypothesisSet& a) const {
    if (a.frame() != frame_) throw FrameMismatchError("mass queried with a foreign hypothesis set");
    return mass_bits(a.bits());
  }

 private:
  Frame frame_;
  Focal focal_;
};

struct ValidationResult {
  bool ok = true;
  std::string message;
};

// Checks the two mass axioms: zero mass on the empty set and total mass 1.
inline ValidationResult validate(const MassFunction& m) {
  double total = 0.0;
  for (const auto& [bits, mass] : m.focal()) {
    if (bits == 0 && std::abs(mass) > kAxiomTol) {
      return {false, "empty set carries mass " + std::to_string(mass)};
    }
    if (mass < 0.0 || mass > 1.0 + kAxiomTol) {
      return {false, "mass outside [0,1] on subset mask " + std::to_string(bits) + ": " +
                         std::to_string(mass)};
    }
    total += mass;
  }
  if (std::abs(total - 1.0) > kAxiomTol) {
    return {false, "masses sum to " + std::to_string(total) + ", violation " +
                       std::to_string(std::abs(total - 1.0))};
  }
  return {};
}

inline double belief(const MassFunction& m, const HypothesisSet& a) {
  if (a.frame() != m.frame()) throw FrameMismatchError("belief queried with a foreign hypothesis set");
  double sum = 0.0;
  for (const auto& [bits, mass] : m.focal()) {
    if (bits != 0 && (bits & ~a.bits()) == 0) sum += mass;
  }
  return sum;
}

inline double plausibility(const MassFunction& m, const HypothesisSet& a) {
  if (a.frame() != m.frame()) {
    throw FrameMismatchError("plausibility queried with a foreign hypothesis set");
  }
  double sum = 0.0;
  for (const auto& [bits, mass] : m.focal()) {
    if ((bits & a.bits()) != 0) sum += mass;
  }
  return sum;
}

struct CombinationResult {
  MassFunction joint;
  double conflict = 0.0;
};

// Dempster's rule: conjunctive product over focal pairs, conflict K collected
// on empty intersections, joint renormalized by 1/(1-K). The joint is
// renormalized to sum exactly 1 so that long folds do not accumulate drift.
inline CombinationResult combine(const MassFunction& m1, const MassFunction& m2) {
  if (m1.frame() != m2.frame()) throw FrameMismatchError("combining masses over different frames");
  const auto theta = m1.frame().theta_mask();
  std::vector<double> joint(theta + 1u, 0.0);
  double conflict = 0.0;
  for (const auto& [b, mb] : m1.focal()) {
    for (const auto& [c, mc] : m2.focal()) {
      const std::uint32_t a = b & c;
      const double product = mb * mc;
      if (a == 0) {
        conflict += product;
      } else {
        joint[a] += product;
      }
    }
  }
  if (conflict >= 1.0 - kTotalConflictTol) throw TotalConflictError(conflict);
  MassFunction::Focal focal;
  double total = 0.0;
  for (std::uint32_t a = 1; a <= theta; ++a) {
    if (joint[a] > 0.0) {
      focal.emplace_back(a, joint[a]);
      total += joint[a];
    }
  }
  for (auto& [bits, mass] : focal) mass /= total;
  return {MassFunction(m1.frame(), std::move(focal)), conflict};
}

struct FoldResult {
  MassFunction joint;
  double conflict = 0.0;                // conflict of the final fold step
  std::vector<double> step_conflicts;   // one entry per combine performed
};

// Left-fold of combine over a non-empty sequence. A single-element sequence
// yields that mass with zero conflict.
inline FoldResult combine_all(std::span<const MassFunction> masses) {
  if (masses.empty()) throw std::invalid_argument("combine_all requires at least one mass function");
  FoldResult result{masses[0], 0.0, {}};
  for (std::size_t i = 1; i < masses.size(); ++i) {
    try {
      CombinationResult step = combine(result.joint, masses[i]);
      result.joint = std::move(step.joint);
      result.conflict = step.conflict;
      result.step_conflicts.push_back(step.conflict);
    } catch (const TotalConflictError& e) {
      throw TotalConflictError(e.conflict(), i);
    }
  }
  return result;
}

// Debug rendering: one "subset: mass" line per focal element, 6 decimals.
inline std::string to_string(const MassFunction& m) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const auto& [bits, mass] : m.focal()) {
    out << HypothesisSet(m.frame(), bits).to_string() << ": " << mass << "\n";
  }
  return out.str();
}

}  // namespace dsc
