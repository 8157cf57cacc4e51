#include "cocyc/shift_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cocyc {
namespace {

long mod(long v, long m) {
  long r = v % m;
  return r < 0 ? r + m : r;
}

Word rotate_left(Word w) {
  std::rotate(w.begin(), w.begin() + 1, w.end());
  return w;
}

Word rotate_right(Word w) {
  std::rotate(w.begin(), w.end() - 1, w.end());
  return w;
}

// Smallest d dividing |w| with w[i] == w[i mod d] for all i.
Word primitive_root(const Word& w) {
  const long n = static_cast<long>(w.size());
  for (long d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (long i = d; i < n && ok; ++i) ok = (w[i] == w[i % d]);
    if (ok) return w.substr(0, d);
  }
  return w;
}

void require_symbols(const Word& w, const char* what) {
  for (char c : w)
    if (c < '1' || c > '9')
      throw InvalidInput(std::string(what) + " contains a non-symbol character");
}

}  // namespace

SymbolicPoint::SymbolicPoint(Word left_period, Word core, Word right_period,
                             long core_start)
    : left_(std::move(left_period)),
      core_(std::move(core)),
      right_(std::move(right_period)),
      start_(core_start) {
  if (left_.empty() || right_.empty())
    throw InvalidInput("tail periods must be nonempty words");
  require_symbols(left_, "left period");
  require_symbols(core_, "core");
  require_symbols(right_, "right period");
  canonicalize();
}

void SymbolicPoint::canonicalize() {
  left_ = primitive_root(left_);
  right_ = primitive_root(right_);

  // Absorb core symbols that already follow the tail patterns. Extending the
  // right tail one step left places right_.back() at the core's last index;
  // extending the left tail one step right places left_.front() at the first.
  while (!core_.empty() && core_.back() == right_.back()) {
    core_.pop_back();
    right_ = rotate_right(right_);
  }
  while (!core_.empty() && core_.front() == left_.front()) {
    core_.erase(core_.begin());
    left_ = rotate_left(left_);
    ++start_;
  }
  if (!core_.empty()) return;

  // Purely periodic iff the primitive tail words coincide (same alignment by
  // construction); re-anchor at 0 so equal sequences compare equal.
  if (left_ == right_) {
    const long p = static_cast<long>(right_.size());
    Word w(right_.size(), '0');
    for (long j = 0; j < p; ++j) w[j] = right_[mod(j - start_, p)];
    left_ = right_ = w;
    start_ = 0;
    return;
  }

  // Empty core, distinct patterns: slide the tail boundary left until the
  // left pattern stops matching the right one. Terminates within
  // lcm(|L|, |R|) steps, else the point would be purely periodic.
  const long guard =
      std::lcm(static_cast<long>(left_.size()), static_cast<long>(right_.size()));
  for (long s = 0; s <= guard && left_.back() == right_.back(); ++s) {
    left_ = rotate_right(left_);
    right_ = rotate_right(right_);
    --start_;
  }
}

char SymbolicPoint::symbol_at(long i) const {
  if (i < start_)
    return left_[mod(i - start_, static_cast<long>(left_.size()))];
  const long off = i - start_;
  if (off < static_cast<long>(core_.size())) return core_[off];
  return right_[mod(off - static_cast<long>(core_.size()),
                    static_cast<long>(right_.size()))];
}

Word SymbolicPoint::window(long lo, long hi) const {
  Word out;
  out.reserve(hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0);
  for (long i = lo; i <= hi; ++i) out.push_back(symbol_at(i));
  return out;
}

std::string SymbolicPoint::str() const {
  return left_ + "|" + core_ + "|" + right_ + "@" + std::to_string(start_);
}

SymbolicPoint SymbolicPoint::parse(const std::string& text) {
  const auto p1 = text.find('|');
  const auto p2 = text.find('|', p1 == std::string::npos ? p1 : p1 + 1);
  const auto at = text.rfind('@');
  if (p1 == std::string::npos || p2 == std::string::npos || at == std::string::npos ||
      at < p2)
    throw InvalidInput("point text must look like L|core|R@start: " + text);
  Word left = text.substr(0, p1);
  Word core = text.substr(p1 + 1, p2 - p1 - 1);
  Word right = text.substr(p2 + 1, at - p2 - 1);
  long start = 0;
  try {
    start = std::stol(text.substr(at + 1));
  } catch (const std::exception&) {
    throw InvalidInput("bad core start in point text: " + text);
  }
  return SymbolicPoint(std::move(left), std::move(core), std::move(right), start);
}

SymbolicPoint shift(const SymbolicPoint& x, long n) {
  return SymbolicPoint(x.left_period(), x.core(), x.right_period(),
                       x.core_start() - n);
}

namespace {

// Window outside which both points are governed by their tail periods:
// agreement on [lo, hi] certifies agreement everywhere.
struct ScanWindow {
  long lo, hi;
};

ScanWindow certifying_window(const SymbolicPoint& x, const SymbolicPoint& y) {
  const long ex = x.core_end(), ey = y.core_end();
  const long sx = x.core_start(), sy = y.core_start();
  const long lcm_r = std::lcm(static_cast<long>(x.right_period().size()),
                              static_cast<long>(y.right_period().size()));
  const long lcm_l = std::lcm(static_cast<long>(x.left_period().size()),
                              static_cast<long>(y.left_period().size()));
  return {std::min({sx, sy, 0L}) - lcm_l, std::max({ex, ey, 0L}) + lcm_r};
}

}  // namespace

std::optional<long> first_disagreement(const SymbolicPoint& x, const SymbolicPoint& y) {
  if (x == y) return std::nullopt;
  const auto [lo, hi] = certifying_window(x, y);
  const long range = std::max(hi, -lo);
  for (long i = 0; i <= range; ++i) {
    if (i <= hi && x.symbol_at(i) != y.symbol_at(i)) return i;
    if (i > 0 && -i >= lo && x.symbol_at(-i) != y.symbol_at(-i)) return i;
  }
  return std::nullopt;  // unreachable for canonical distinct points
}

std::optional<long> stable_agreement_start(const SymbolicPoint& x,
                                           const SymbolicPoint& y) {
  const auto [lo, hi] = certifying_window(x, y);
  const long tail = std::max({x.core_end(), y.core_end(), 0L});
  for (long i = tail + 1; i <= hi; ++i)
    if (x.symbol_at(i) != y.symbol_at(i)) return std::nullopt;
  for (long i = tail; i >= lo; --i)
    if (x.symbol_at(i) != y.symbol_at(i)) return i + 1;
  return lo;  // equal points: any m works
}

std::optional<long> unstable_agreement_end(const SymbolicPoint& x,
                                           const SymbolicPoint& y) {
  const auto [lo, hi] = certifying_window(x, y);
  const long head = std::min({x.core_start(), y.core_start(), 0L});
  for (long i = head - 1; i >= lo; --i)
    if (x.symbol_at(i) != y.symbol_at(i)) return std::nullopt;
  for (long i = head; i <= hi; ++i)
    if (x.symbol_at(i) != y.symbol_at(i)) return i - 1;
  return hi;  // equal points
}

PeriodicOrbitPoint::PeriodicOrbitPoint(Word word)
    : word_(std::move(word)), point_(word_, Word{}, word_, 0) {
  if (word_.empty()) throw InvalidInput("periodic word must be nonempty");
}

double ClosedSegment::shadow_bound(long i) const {
  if (i < start || i >= start + length) return 1.0;
  const long depth = std::min(i - start, start + length - 1 - i);
  return std::pow(nu, static_cast<double>(depth));
}

ShiftSpec::ShiftSpec(int alphabet_size, std::vector<std::uint8_t> adjacency, double nu)
    : k_(alphabet_size), adj_(std::move(adjacency)), nu_(nu), mixing_power_(0) {
  if (k_ < 1 || k_ > 9)
    throw InvalidInput("alphabet size must be between 1 and 9");
  if (adj_.size() != static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_))
    throw InvalidInput("adjacency matrix must have alphabet_size^2 entries");
  for (auto v : adj_)
    if (v != 0 && v != 1) throw InvalidInput("adjacency entries must be 0 or 1");
  if (!(nu_ > 0.0 && nu_ < 1.0)) throw InvalidInput("nu must lie in (0, 1)");

  for (int a = 0; a < k_; ++a) {
    bool row = false, col = false;
    for (int b = 0; b < k_; ++b) {
      row = row || adj_[a * k_ + b];
      col = col || adj_[b * k_ + a];
    }
    if (!row) throw InvalidInput("adjacency row " + std::to_string(a + 1) + " empty");
    if (!col)
      throw InvalidInput("adjacency column " + std::to_string(a + 1) + " empty");
  }

  // Wielandt bound: a primitive 0/1 matrix has a positive power of exponent
  // at most (k-1)^2 + 1.
  const int bound = (k_ - 1) * (k_ - 1) + 1;
  std::vector<std::uint8_t> power = adj_;
  for (int n = 1; n <= bound; ++n) {
    if (std::all_of(power.begin(), power.end(), [](std::uint8_t v) { return v != 0; })) {
      mixing_power_ = n;
      break;
    }
    std::vector<std::uint8_t> next(adj_.size(), 0);
    for (int a = 0; a < k_; ++a)
      for (int c = 0; c < k_; ++c) {
        std::uint8_t acc = 0;
        for (int b = 0; b < k_ && !acc; ++b)
          acc = static_cast<std::uint8_t>(power[a * k_ + b] & adj_[b * k_ + c]);
        next[a * k_ + c] = acc;
      }
    power = std::move(next);
  }
  if (mixing_power_ == 0)
    throw InvalidInput("adjacency matrix is not mixing (no power is strictly positive)");
}

bool ShiftSpec::allowed(char a, char b) const {
  const int ia = a - '1', ib = b - '1';
  if (ia < 0 || ia >= k_ || ib < 0 || ib >= k_) return false;
  return adj_[ia * k_ + ib] != 0;
}

bool ShiftSpec::word_admissible(const Word& w) const {
  for (char c : w)
    if (c < '1' || c >= '1' + k_) return false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!allowed(w[i], w[i + 1])) return false;
  return true;
}

bool ShiftSpec::cyclic_word_admissible(const Word& w) const {
  if (w.empty()) return false;
  return word_admissible(w) && allowed(w.back(), w.front());
}

std::vector<Word> ShiftSpec::admissible_words(int length) const {
  std::vector<Word> out;
  if (length < 0) return out;
  if (length == 0) {
    out.emplace_back();
    return out;
  }
  Word w;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(w.size()) == length) {
      out.push_back(w);
      return;
    }
    for (char c = '1'; c < '1' + k_; ++c) {
      if (!w.empty() && !allowed(w.back(), c)) continue;
      w.push_back(c);
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
  return out;
}

SymbolicPoint ShiftSpec::point(Word left_period, Word core, Word right_period,
                               long core_start) const {
  SymbolicPoint p(std::move(left_period), std::move(core), std::move(right_period),
                  core_start);
  if (!point_admissible(p))
    throw InvalidInput("point " + p.str() + " is not admissible for this shift");
  return p;
}

PeriodicOrbitPoint ShiftSpec::periodic_point(Word word) const {
  if (!cyclic_word_admissible(word))
    throw InvalidInput("cyclic word " + word + " is not admissible for this shift");
  return PeriodicOrbitPoint(std::move(word));
}

bool ShiftSpec::point_admissible(const SymbolicPoint& x) const {
  if (!cyclic_word_admissible(x.left_period())) return false;
  if (!cyclic_word_admissible(x.right_period())) return false;
  // The stretch around the core covers every remaining adjacent pair.
  return word_admissible(x.window(x.core_start() - 1, x.core_end() + 1));
}

double ShiftSpec::distance(const SymbolicPoint& x, const SymbolicPoint& y) const {
  const auto n = first_disagreement(x, y);
  if (!n) return 0.0;
  return std::pow(nu_, static_cast<double>(*n));
}

bool ShiftSpec::in_local_stable(const SymbolicPoint& y, const SymbolicPoint& x) const {
  const auto m = stable_agreement_start(x, y);
  return m && *m <= 0;
}

bool ShiftSpec::in_local_unstable(const SymbolicPoint& y, const SymbolicPoint& x) const {
  const auto m = unstable_agreement_end(x, y);
  return m && *m >= 0;
}

SymbolicPoint ShiftSpec::bracket(const SymbolicPoint& x, const SymbolicPoint& z) const {
  if (x.symbol_at(0) != z.symbol_at(0))
    throw BracketUndefined(std::string("bracket undefined: x_0 = ") + x.symbol_at(0) +
                           " but z_0 = " + z.symbol_at(0));
  const long cut_lo = std::min(z.core_start(), 0L);
  const long cut_hi = std::max(x.core_end(), 0L);

  const long p = static_cast<long>(z.left_period().size());
  Word left(static_cast<std::size_t>(p), '0');
  for (long j = 0; j < p; ++j)
    left[j] = z.left_period()[mod(j + cut_lo - z.core_start(), p)];

  const long q = static_cast<long>(x.right_period().size());
  Word right(static_cast<std::size_t>(q), '0');
  for (long j = 0; j < q; ++j)
    right[j] = x.right_period()[mod(j + cut_hi - x.core_end(), q)];

  Word core = z.window(cut_lo, -1) + x.window(0, cut_hi);
  return SymbolicPoint(std::move(left), std::move(core), std::move(right), cut_lo);
}

std::vector<PeriodicOrbitPoint> ShiftSpec::enumerate_periodic(int k) const {
  std::vector<PeriodicOrbitPoint> out;
  if (k < 1) return out;
  for (auto& w : admissible_words(k))
    if (allowed(w.back(), w.front())) out.emplace_back(std::move(w));
  return out;
}

std::vector<PeriodicOrbitPoint> ShiftSpec::orbit_representatives(int max_period) const {
  std::vector<PeriodicOrbitPoint> out;
  for (int k = 1; k <= max_period; ++k) {
    for (auto& w : admissible_words(k)) {
      if (!allowed(w.back(), w.front())) continue;
      if (primitive_root(w).size() != w.size()) continue;
      bool minimal = true;
      Word rot = w;
      for (int j = 1; j < k && minimal; ++j) {
        rot = rotate_left(std::move(rot));
        minimal = !(rot < w);
      }
      if (minimal) out.emplace_back(std::move(w));
    }
  }
  return out;
}

std::vector<SymbolicPoint> ShiftSpec::enumerate_homoclinic(const PeriodicOrbitPoint& p0,
                                                           int budget) const {
  if (budget < 0) throw InvalidInput("homoclinic budget must be nonnegative");
  const SymbolicPoint& base = p0.point();
  std::vector<SymbolicPoint> out;
  if (budget == 0) {
    out.push_back(base);
    return out;
  }
  const char before = base.symbol_at(-1);
  const char after = base.symbol_at(budget);
  const long k = static_cast<long>(base.right_period().size());
  Word right(static_cast<std::size_t>(k), '0');
  for (long j = 0; j < k; ++j)
    right[j] = base.right_period()[mod(j + budget, k)];
  for (auto& c : admissible_words(budget)) {
    if (!allowed(before, c.front()) || !allowed(c.back(), after)) continue;
    out.emplace_back(base.left_period(), c, right, 0);
  }
  return out;
}

ClosedSegment ShiftSpec::close_segment(const SymbolicPoint& x, long start,
                                       long length) const {
  if (length < 1) throw InvalidInput("segment length must be positive");
  Word w = x.window(start, start + length - 1);
  if (!allowed(w.back(), w.front()))
    throw ClosingInadmissible(std::string("cannot close segment: transition ") +
                              w.back() + " -> " + w.front() + " is forbidden");
  Word anchored(w.size(), '0');
  for (long j = 0; j < length; ++j) anchored[j] = w[mod(j - start, length)];
  return ClosedSegment{PeriodicOrbitPoint(std::move(anchored)), start, length, nu_};
}

std::optional<Word> ShiftSpec::bridge(char from, char to, int length,
                                      DetRng* rng) const {
  if (length < 0) throw InvalidInput("bridge length must be nonnegative");
  if (length == 0)
    return allowed(from, to) ? std::optional<Word>(Word{}) : std::nullopt;
  // can[j][sym]: a word occupying positions j..length-1 may start with sym
  // and still end adjacent to `to`.
  std::vector<std::vector<bool>> can(
      static_cast<std::size_t>(length),
      std::vector<bool>(static_cast<std::size_t>(k_)));
  for (int sym = 0; sym < k_; ++sym)
    can[static_cast<std::size_t>(length - 1)][static_cast<std::size_t>(sym)] =
        allowed(static_cast<char>('1' + sym), to);
  for (int j = length - 2; j >= 0; --j)
    for (int sym = 0; sym < k_; ++sym) {
      bool ok = false;
      for (int nxt = 0; nxt < k_ && !ok; ++nxt)
        ok = allowed(static_cast<char>('1' + sym), static_cast<char>('1' + nxt)) &&
             can[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(nxt)];
      can[static_cast<std::size_t>(j)][static_cast<std::size_t>(sym)] = ok;
    }
  Word w;
  w.reserve(static_cast<std::size_t>(length));
  char prev = from;
  for (int j = 0; j < length; ++j) {
    std::vector<char> options;
    for (int sym = 0; sym < k_; ++sym) {
      const char ch = static_cast<char>('1' + sym);
      if (allowed(prev, ch) &&
          can[static_cast<std::size_t>(j)][static_cast<std::size_t>(sym)])
        options.push_back(ch);
    }
    if (options.empty()) return std::nullopt;
    prev = rng ? options[static_cast<std::size_t>(rng->below(options.size()))]
               : options.front();
    w.push_back(prev);
  }
  return w;
}

Word ShiftSpec::cycle_through(char sym) const {
  for (int len = 0; len <= 2 * k_; ++len)
    if (auto w = bridge(sym, sym, len)) return Word(1, sym) + *w;
  throw InvalidInput(std::string("symbol ") + sym + " lies on no admissible cycle");
}

SymbolicPoint ShiftSpec::point_from_window(const Word& w, long lo) const {
  if (w.empty()) throw InvalidInput("window word must be nonempty");
  if (!word_admissible(w)) throw InvalidInput("window word is not admissible");
  Word left, right;
  for (int sym = 0; sym < k_ && left.empty(); ++sym) {
    const char b = static_cast<char>('1' + sym);
    if (allowed(b, w.front())) {
      left = cycle_through(b);
      std::rotate(left.begin(), left.begin() + 1, left.end());  // ends at b
    }
  }
  for (int sym = 0; sym < k_ && right.empty(); ++sym) {
    const char d = static_cast<char>('1' + sym);
    if (allowed(w.back(), d)) right = cycle_through(d);
  }
  return point(left, w, right, lo);
}

}  // namespace cocyc
