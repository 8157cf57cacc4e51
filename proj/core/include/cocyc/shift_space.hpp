#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cocyc/errors.hpp"
#include "cocyc/rng.hpp"

// Two-sided subshifts of finite type with eventually periodic points as the
// exact, finitely represented point type. All admissibility and metric
// questions about such points are decidable; the routines here answer them
// without floating error beyond the final pow().
namespace cocyc {

// Symbols are '1'..'9' so words double as printable keys.
using Word = std::string;

// An eventually periodic bi-infinite sequence
//   ... L L | core | R R ...
// where the left period L fills indices < core_start (its last letter sits
// at core_start - 1), the core occupies [core_start, core_start + len - 1],
// and the right period R fills the rest. Construction canonicalizes:
// periods are primitive, the core cannot be absorbed into either tail, and
// purely periodic points are anchored at 0. Equal sequences then have equal
// representations, so operator== decides equality of points.
class SymbolicPoint {
 public:
  SymbolicPoint(Word left_period, Word core, Word right_period, long core_start);

  char symbol_at(long i) const;
  Word window(long lo, long hi) const;  // symbols at [lo, hi], inclusive

  const Word& left_period() const { return left_; }
  const Word& core() const { return core_; }
  const Word& right_period() const { return right_; }
  long core_start() const { return start_; }
  long core_end() const { return start_ + static_cast<long>(core_.size()) - 1; }

  bool purely_periodic() const { return core_.empty() && left_ == right_; }

  friend bool operator==(const SymbolicPoint&, const SymbolicPoint&) = default;

  // Canonical text form "L|core|R@start", e.g. "1||1@0" for the fixed
  // point of all 1s and "1|2|1@0" for a single 2 at index 0.
  std::string str() const;
  static SymbolicPoint parse(const std::string& text);

 private:
  Word left_, core_, right_;
  long start_;
  void canonicalize();
};

// (f x)_i = x_{i+n}.
SymbolicPoint shift(const SymbolicPoint& x, long n);

// Smallest |i| with x_i != y_i; nullopt when x == y.
std::optional<long> first_disagreement(const SymbolicPoint& x, const SymbolicPoint& y);

// Smallest m such that x_i == y_i for all i >= m (the right tails must agree;
// nullopt otherwise). m <= 0 means y is on the local stable leaf of x.
std::optional<long> stable_agreement_start(const SymbolicPoint& x, const SymbolicPoint& y);
// Largest m such that x_i == y_i for all i <= m; nullopt when left tails differ.
std::optional<long> unstable_agreement_end(const SymbolicPoint& x, const SymbolicPoint& y);

// A point of the periodic orbit generated by repeating `word`, anchored so
// that x_i = word[i mod k]. The word need not be primitive: "11" names the
// same sequence as "1" but counts as a period-2 point when enumerating
// fixed points of f^2.
class PeriodicOrbitPoint {
 public:
  explicit PeriodicOrbitPoint(Word word);
  const Word& word() const { return word_; }
  int period() const { return static_cast<int>(word_.size()); }
  const SymbolicPoint& point() const { return point_; }
  friend bool operator==(const PeriodicOrbitPoint&, const PeriodicOrbitPoint&) = default;

 private:
  Word word_;
  SymbolicPoint point_;
};

// Periodization of a finite window of x, with the exponential shadowing
// bound dist(f^i x, f^i q) <= nu^min(i - start, end - i) on the window.
struct ClosedSegment {
  PeriodicOrbitPoint orbit;
  long start = 0;
  long length = 0;
  double nu = 0.5;
  double shadow_bound(long i) const;
};

// A mixing subshift of finite type: alphabet {1..k}, 0/1 adjacency matrix
// (entry (a,b) allows the word "ab"), and the metric d(x,y) = nu^n(x,y).
class ShiftSpec {
 public:
  ShiftSpec(int alphabet_size, std::vector<std::uint8_t> adjacency, double nu = 0.5);

  int alphabet_size() const { return k_; }
  double nu() const { return nu_; }
  // Row-major 0/1 entries, k*k of them.
  const std::vector<std::uint8_t>& adjacency() const { return adj_; }
  // Smallest N with all entries of adjacency^N positive.
  int mixing_power() const { return mixing_power_; }
  bool allowed(char a, char b) const;

  friend bool operator==(const ShiftSpec& a, const ShiftSpec& b) {
    return a.k_ == b.k_ && a.adj_ == b.adj_ && a.nu_ == b.nu_;
  }

  bool word_admissible(const Word& w) const;
  bool cyclic_word_admissible(const Word& w) const;
  // All admissible words of the given length, lexicographic.
  std::vector<Word> admissible_words(int length) const;

  // Factories; validate every adjacent pair including the periodic wraps.
  SymbolicPoint point(Word left_period, Word core, Word right_period, long core_start) const;
  PeriodicOrbitPoint periodic_point(Word word) const;
  bool point_admissible(const SymbolicPoint& x) const;

  // d(x, y) = nu^{min |i| with x_i != y_i}; 0 when equal, 1 when x_0 != y_0.
  double distance(const SymbolicPoint& x, const SymbolicPoint& y) const;

  bool in_local_stable(const SymbolicPoint& y, const SymbolicPoint& x) const;
  bool in_local_unstable(const SymbolicPoint& y, const SymbolicPoint& x) const;

  // y with y_i = x_i for i >= 0 and y_i = z_i for i <= 0; needs x_0 == z_0.
  SymbolicPoint bracket(const SymbolicPoint& x, const SymbolicPoint& z) const;

  // All fixed points of f^k, one per admissible cyclic word of length k;
  // their number is trace(adjacency^k). Lexicographic in the word.
  std::vector<PeriodicOrbitPoint> enumerate_periodic(int k) const;

  // One representative per orbit of least period <= max_period
  // (lexicographically least rotation of each primitive cyclic word).
  std::vector<PeriodicOrbitPoint> orbit_representatives(int max_period) const;

  // Points that agree with the sequence of p0 everywhere outside [0, budget):
  // exactly the homoclinic points of p0 (as a fixed point of f^period) whose
  // free window sits at [0, budget). Lexicographic in the window content;
  // budget 0 yields just p0.
  std::vector<SymbolicPoint> enumerate_homoclinic(const PeriodicOrbitPoint& p0,
                                                  int budget) const;

  // Anosov-closing at the symbolic level: periodize x on [start, start+length).
  ClosedSegment close_segment(const SymbolicPoint& x, long start, long length) const;

  // Admissible word w of the given length with allowed(from, w[0]), an
  // admissible chain, and allowed(w.back(), to); length 0 asks whether from
  // and to are directly adjacent (empty word). Lexicographically least word
  // when rng is null, a random feasible walk otherwise; nullopt when none
  // exists (never for length + 1 >= mixing_power()).
  std::optional<Word> bridge(char from, char to, int length,
                             DetRng* rng = nullptr) const;

  // Shortest admissible cycle through sym (sym included, lex-least among
  // shortest); exists for every symbol since the graph is strongly connected.
  Word cycle_through(char sym) const;

  // The point whose window at [lo, lo + |w| - 1] is w, completed on both
  // sides by the lexicographically least admissible periodic tails.
  SymbolicPoint point_from_window(const Word& w, long lo) const;

 private:
  int k_;
  std::vector<std::uint8_t> adj_;
  double nu_;
  int mixing_power_;
};

}  // namespace cocyc
