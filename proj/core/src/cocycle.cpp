#include "cocyc/cocycle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cocyc/errors.hpp"

namespace cocyc {

namespace {

std::string window_of(const SymbolicPoint& x, long center, int radius) {
  return x.window(center - radius, center + radius);
}

}  // namespace

LocallyConstantGenerator::LocallyConstantGenerator(
    int window_radius, double beta, std::map<Word, InvertibleOperator> table)
    : radius_(window_radius), beta_(beta), table_(std::move(table)) {
  if (radius_ < 0) throw InvalidInput("window radius must be nonnegative");
  if (!(beta_ > 0.0) || beta_ > 1.0)
    throw InvalidInput("Holder exponent beta must lie in (0, 1]");
  if (table_.empty()) throw InvalidInput("generator table is empty");
  const auto len = static_cast<std::size_t>(2 * radius_ + 1);
  dim_ = table_.begin()->second.dim();
  for (const auto& [word, op] : table_) {
    if (word.size() != len)
      throw InvalidInput("generator table word '" + word +
                         "' does not match window length " +
                         std::to_string(len));
    if (op.dim() != dim_)
      throw DimensionMismatch("generator table mixes operator dimensions");
  }
}

const InvertibleOperator& LocallyConstantGenerator::at(const Word& window) const {
  auto it = table_.find(window);
  if (it == table_.end())
    throw InvalidInput("generator table has no entry for window '" + window + "'");
  return it->second;
}

CocycleInstance::CocycleInstance(ShiftSpec shift, LocallyConstantGenerator generator)
    : shift_(std::move(shift)), gen_(std::move(generator)) {
  for (const auto& word : shift_.admissible_words(2 * gen_.window_radius() + 1))
    gen_.at(word);
  for (const auto& [word, op] : gen_.table())
    if (!shift_.word_admissible(word))
      throw InvalidInput("generator table entry for inadmissible word '" + word + "'");
}

const InvertibleOperator& CocycleInstance::evaluate(const SymbolicPoint& x) const {
  return gen_.at(window_of(x, 0, gen_.window_radius()));
}

InvertibleOperator CocycleInstance::iterate(const SymbolicPoint& x, long n) const {
  if (n < 0) return iterate(cocyc::shift(x, n), -n).inverse();
  if (n > kIterateCap)
    throw InvalidInput("iterate count exceeds cap of " + std::to_string(kIterateCap));
  InvertibleOperator acc = InvertibleOperator::identity(gen_.dim());
  const int r = gen_.window_radius();
  for (long j = 0; j < n; ++j) acc = gen_.at(window_of(x, j, r)).compose(acc);
  return acc;
}

double CocycleInstance::q_distortion(const SymbolicPoint& x, long n) const {
  const InvertibleOperator an = iterate(x, n);
  return op_norm(an) * op_norm(an.inverse());
}

double CocycleInstance::bunching_gap(const SymbolicPoint& x, long n) const {
  if (n < 1) throw InvalidInput("bunching gap requires n >= 1");
  const LogProductNorms logs = log_iterate_norms(*this, x, n);
  return logs.log_norm + logs.log_inv_norm +
         static_cast<double>(n) * gen_.beta() * std::log(shift_.nu());
}

double CocycleInstance::holder_constant() const {
  double max_d = 0.0;
  for (auto it = gen_.table().begin(); it != gen_.table().end(); ++it)
    for (auto jt = std::next(it); jt != gen_.table().end(); ++jt)
      max_d = std::max(max_d, metric_d(it->second, jt->second));
  const double scale =
      std::pow(shift_.nu(), gen_.window_radius() * gen_.beta());
  return max_d / scale;
}

LogProductNorms log_iterate_norms(const CocycleInstance& c, const SymbolicPoint& x,
                                  long n) {
  if (n < 0) throw InvalidInput("log_iterate_norms requires n >= 0");
  const int d = c.dim();
  const int r = c.window_radius();
  Eigen::MatrixXd fwd = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(d, d);
  double log_fwd = 0.0, log_inv = 0.0;
  constexpr double kRescaleAt = 1e120;
  for (long j = 0; j < n; ++j) {
    const InvertibleOperator& step = c.generator().at(window_of(x, j, r));
    fwd = step.matrix() * fwd;
    inv = inv * step.inverse_matrix();
    if (const double m = fwd.cwiseAbs().maxCoeff(); m > kRescaleAt) {
      fwd /= m;
      log_fwd += std::log(m);
    }
    if (const double m = inv.cwiseAbs().maxCoeff(); m > kRescaleAt) {
      inv /= m;
      log_inv += std::log(m);
    }
  }
  return {std::log(spectral_norm(fwd)) + log_fwd,
          std::log(spectral_norm(inv)) + log_inv};
}

CocycleInstance make_coboundary(const CocycleInstance& base,
                                const LocallyConstantGenerator& conj) {
  if (conj.dim() != base.dim())
    throw DimensionMismatch("transfer map dimension does not match cocycle");
  const int rb = base.window_radius();
  const int rc = conj.window_radius();
  const int radius = std::max(rb, rc) + 1;
  const auto sub = [](const Word& w, int center, int rad) {
    return w.substr(static_cast<std::size_t>(center - rad),
                    static_cast<std::size_t>(2 * rad + 1));
  };
  std::map<Word, InvertibleOperator> table;
  for (const auto& word : base.shift().admissible_words(2 * radius + 1)) {
    const InvertibleOperator& c_fx = conj.at(sub(word, radius + 1, rc));
    const InvertibleOperator& b_x = base.generator().at(sub(word, radius, rb));
    const InvertibleOperator& c_x = conj.at(sub(word, radius, rc));
    table.emplace(word, c_fx.compose(b_x).compose(c_x.inverse()));
  }
  return CocycleInstance(base.shift(),
                         LocallyConstantGenerator(radius, base.beta(), std::move(table)));
}

}  // namespace cocyc
