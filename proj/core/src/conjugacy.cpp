#include "cocyc/conjugacy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cocyc/errors.hpp"
#include "cocyc/holonomy.hpp"
#include "cocyc/parallel.hpp"
#include "cocyc/rng.hpp"

namespace cocyc {

namespace {

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int d) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct DualValue {
  InvertibleOperator value;  // stable route including the base factor C_p0
  double defect;             // metric_d between the stable and unstable routes
};

// C(x) on a homoclinic point of p0 through both holonomy routes.
DualValue cbar_at(const CocycleInstance& a, const CocycleInstance& b_conj,
                  const SymbolicPoint& p0, const InvertibleOperator& c_p0,
                  const SymbolicPoint& x) {
  const InvertibleOperator cs =
      detail::holonomy_product(a, p0, x, LeafKind::stable)
          .op.compose(detail::holonomy_product(b_conj, x, p0, LeafKind::stable).op);
  const InvertibleOperator cu =
      detail::holonomy_product(a, p0, x, LeafKind::unstable)
          .op.compose(detail::holonomy_product(b_conj, x, p0, LeafKind::unstable).op);
  return DualValue{cs.compose(c_p0), metric_d(cs, cu)};
}

CocycleInstance conjugate_by_constant(const CocycleInstance& b,
                                      const InvertibleOperator& c) {
  std::map<Word, InvertibleOperator> table;
  for (const auto& [word, op] : b.generator().table())
    table.emplace(word, c.compose(op).compose(c.inverse()));
  return CocycleInstance(
      b.shift(), LocallyConstantGenerator(b.window_radius(), b.beta(), std::move(table)));
}

void require_same_pair(const CocycleInstance& a, const CocycleInstance& b) {
  if (!(a.shift() == b.shift()))
    throw InvalidInput("cocycles live over different shift spaces");
  if (a.dim() != b.dim())
    throw DimensionMismatch("cocycles have different fiber dimensions");
  if (a.beta() != b.beta())
    throw InvalidInput("cocycles carry different Holder exponents");
}

}  // namespace

InvertibleOperator solve_periodic_conjugacy(const InvertibleOperator& a_block,
                                            const InvertibleOperator& b_block,
                                            const IntertwinerSolveOptions& opts) {
  if (a_block.dim() != b_block.dim())
    throw DimensionMismatch("periodic blocks have different dimensions");
  const int d = a_block.dim();
  const Eigen::MatrixXd& am = a_block.matrix();
  const Eigen::MatrixXd& bm = b_block.matrix();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  // vec(B X - X A) = (I (x) B - A^T (x) I) vec X, column-major vec.
  Eigen::MatrixXd sylvester = Eigen::MatrixXd::Zero(d * d, d * d);
  for (int ci = 0; ci < d; ++ci)
    for (int cj = 0; cj < d; ++cj) {
      sylvester.block(ci * d, cj * d, d, d) =
          eye(ci, cj) * bm - am(cj, ci) * eye;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sylvester, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double thr = 1e-10 * std::max(sigma.size() > 0 ? sigma(0) : 0.0, 1.0);
  int kernel_dim = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) <= thr) ++kernel_dim;
  if (kernel_dim == 0)
    throw NotConjugate("periodic blocks admit no nonzero intertwiner");
  const Eigen::MatrixXd kernel =
      svd.matrixV().rightCols(kernel_dim);

  const double mat_scale = am.norm() + bm.norm();
  const auto try_candidate =
      [&](const Eigen::VectorXd& coords) -> std::optional<InvertibleOperator> {
    const Eigen::VectorXd v = kernel * coords;
    if (v.norm() < 1e-12) return std::nullopt;
    Eigen::MatrixXd x = unvec(v, d);
    Eigen::JacobiSVD<Eigen::MatrixXd> xsvd(x);
    const double smax = xsvd.singularValues()(0);
    const double smin = xsvd.singularValues()(d - 1);
    if (!(smin > 1e-8 * smax)) return std::nullopt;
    x /= smax;
    if ((bm * x - x * am).norm() > opts.residual_tol * mat_scale * x.norm())
      return std::nullopt;
    try {
      return InvertibleOperator(x);
    } catch (const InvalidInput&) {
      return std::nullopt;
    }
  };

  Eigen::VectorXd id_coords =
      kernel.transpose() * Eigen::Map<const Eigen::VectorXd>(eye.data(), d * d);
  if (auto c = try_candidate(id_coords)) return *c;
  for (int i = 0; i < kernel_dim; ++i)
    if (auto c = try_candidate(Eigen::VectorXd::Unit(kernel_dim, i))) return *c;
  DetRng rng(opts.seed);
  for (int attempt = 0; attempt < opts.random_attempts; ++attempt) {
    Eigen::VectorXd coords(kernel_dim);
    for (int i = 0; i < kernel_dim; ++i) coords(i) = rng.uniform(-1.0, 1.0);
    if (auto c = try_candidate(coords)) return *c;
  }
  throw NotConjugate("no invertible intertwiner found in a solution space of dimension " +
                     std::to_string(kernel_dim));
}

PeriodicDataScan scan_periodic_data(const CocycleInstance& a,
                                    const CocycleInstance& b, int max_period,
                                    const IntertwinerSolveOptions& opts) {
  require_same_pair(a, b);
  if (max_period < 1) throw InvalidInput("periodic scan needs max_period >= 1");
  const auto reps = a.shift().orbit_representatives(max_period);
  if (reps.empty())
    throw InvalidInput("shift has no periodic orbits up to the requested period");
  PeriodicDataScan scan;
  scan.m_bound = 0.0;
  scan.holder_diagnostic = 0.0;
  scan.base_word = reps.front().word();
  for (std::size_t rep_idx = 0; rep_idx < reps.size(); ++rep_idx) {
    const PeriodicOrbitPoint& rep = reps[rep_idx];
    const int k = rep.period();
    const InvertibleOperator ak = a.iterate(rep.point(), k);
    const InvertibleOperator bk = b.iterate(rep.point(), k);
    const double scale = op_norm(ak) + op_norm(bk);
    std::optional<InvertibleOperator> c0;
    bool equal_blocks = false;
    if (metric_d(ak, bk) <= 1e-12 * scale) {
      c0 = InvertibleOperator::identity(a.dim());
      equal_blocks = true;
    } else {
      IntertwinerSolveOptions orbit_opts = opts;
      orbit_opts.seed = derive_seed(opts.seed, rep_idx);
      try {
        // transfer direction: A^k_p = C B^k_p C^{-1}
        c0 = solve_periodic_conjugacy(bk, ak, orbit_opts);
      } catch (const NotConjugate& e) {
        scan.failure = ConjugacyFailure{rep.word(), k, e.what()};
        return scan;
      }
    }
    // Propagate around the orbit; each rotation gets its own residual check.
    Word word = rep.word();
    InvertibleOperator c = *c0;
    for (int j = 0; j < k; ++j) {
      const PeriodicOrbitPoint q = a.shift().periodic_point(word);
      const InvertibleOperator akq = a.iterate(q.point(), k);
      const InvertibleOperator bkq = b.iterate(q.point(), k);
      const double residual =
          spectral_norm(akq.matrix() -
                        c.compose(bkq).compose(c.inverse()).matrix()) /
          spectral_norm(akq.matrix());
      const double bound = std::max(op_norm(c), op_norm(c.inverse()));
      scan.data.push_back(PeriodicConjugacyDatum{q, k, c, bound, residual,
                                                 equal_blocks && j == 0});
      scan.m_bound = std::max(scan.m_bound, bound);
      if (j + 1 < k) {
        c = a.evaluate(q.point()).compose(c).compose(b.evaluate(q.point()).inverse());
        std::rotate(word.begin(), word.begin() + 1, word.end());
      }
    }
  }
  const PeriodicConjugacyDatum& base = scan.data.front();
  for (const PeriodicConjugacyDatum& datum : scan.data) {
    if (datum.point == base.point) continue;
    const double dist = a.shift().distance(datum.point.point(), base.point.point());
    scan.holder_diagnostic =
        std::max(scan.holder_diagnostic,
                 metric_d(datum.c_p, base.c_p) / std::pow(dist, a.beta()));
  }
  return scan;
}

SynthesizedConjugacy::SynthesizedConjugacy(CocycleInstance a, CocycleInstance b,
                                           CocycleInstance b_conj,
                                           BunchingCertificate cert,
                                           PeriodicOrbitPoint p0,
                                           InvertibleOperator c_p0, int budget,
                                           double defect_tol)
    : a_(std::move(a)),
      b_(std::move(b)),
      b_conj_(std::move(b_conj)),
      cert_(cert),
      p0_(std::move(p0)),
      c_p0_(std::move(c_p0)),
      budget_(budget),
      defect_tol_(defect_tol) {}

std::optional<InvertibleOperator> SynthesizedConjugacy::stored_value(
    const SymbolicPoint& x) const {
  auto it = index_.find(x.str());
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

SynthesizedConjugacy synth_homoclinic(const CocycleInstance& a,
                                      const CocycleInstance& b,
                                      const BunchingCertificate& cert_a,
                                      const PeriodicOrbitPoint& p0,
                                      const InvertibleOperator& c_p0, int budget,
                                      double defect_tol, int workers) {
  require_same_pair(a, b);
  if (!(cert_a.theta > 0.0) || !(cert_a.theta < 1.0) || !(cert_a.L >= 1.0))
    throw NoCertificate("synthesis requires a valid bunching certificate");
  if (c_p0.dim() != a.dim())
    throw DimensionMismatch("base transfer value has the wrong dimension");
  if (budget < 0) throw InvalidInput("homoclinic budget must be nonnegative");
  if (!(defect_tol > 0.0)) throw InvalidInput("defect tolerance must be positive");
  a.shift().periodic_point(p0.word());  // validates admissibility incl. wrap

  SynthesizedConjugacy sc(a, b, conjugate_by_constant(b, c_p0), cert_a, p0, c_p0,
                          budget, defect_tol);
  const std::vector<SymbolicPoint> points =
      a.shift().enumerate_homoclinic(p0, budget);
  std::vector<std::optional<DualValue>> computed(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    computed[i] = cbar_at(sc.a_, sc.b_conj_, sc.p0_.point(), sc.c_p0_, points[i]);
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    const DualValue& dual = *computed[i];
    sc.max_defect_ = std::max(sc.max_defect_, dual.defect);
    if (dual.defect > defect_tol)
      throw DefectExceeded("stable/unstable defect " + format_double(dual.defect) +
                           " at point " + points[i].str() +
                           " exceeds tolerance " + format_double(defect_tol));
  }

  std::vector<std::pair<std::string, std::size_t>> order(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order[i] = {points[i].str(), i};
  std::sort(order.begin(), order.end());
  sc.entries_.reserve(points.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank].second;
    sc.index_.emplace(order[rank].first, rank);
    sc.entries_.emplace_back(points[i], computed[i]->value);
  }

  // Holder diagnostic over all stored pairs.
  const std::size_t n = sc.entries_.size();
  std::vector<double> row_max(n, 0.0);
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist =
          sc.a_.shift().distance(sc.entries_[i].first, sc.entries_[j].first);
      const double ratio =
          metric_d(sc.entries_[i].second, sc.entries_[j].second) /
          std::pow(dist, sc.beta());
      row_max[i] = std::max(row_max[i], ratio);
    }
  });
  for (double r : row_max) sc.holder_ = std::max(sc.holder_, r);
  return sc;
}

ExtendedValue evaluate_extended(const SynthesizedConjugacy& sc,
                                const SymbolicPoint& x, double delta) {
  const ShiftSpec& s = sc.a().shift();
  if (!(delta > 0.0)) throw InvalidInput("evaluation accuracy delta must be positive");
  if (!s.point_admissible(x)) throw InvalidInput("point is not admissible for the shift");
  if (auto stored = sc.stored_value(x))
    return ExtendedValue{*stored, 0.0, true, x};
  const SymbolicPoint& p0 = sc.base_point().point();
  if (stable_agreement_start(x, p0) && unstable_agreement_end(x, p0)) {
    const DualValue dual = cbar_at(sc.a(), sc.b_conj(), p0, sc.base_value(), x);
    return ExtendedValue{dual.value, 0.0, false, x};
  }

  // Splice x onto the tails of p0 outside [-m, m], nu^m <= delta, with
  // shortest admissible bridges at the junctions.
  long m = 0;
  if (delta < 1.0)
    m = static_cast<long>(std::ceil(std::log(delta) / std::log(s.nu())));
  std::optional<Word> bridge_l, bridge_r;
  int bl = 0, br = 0;
  for (; bl <= s.mixing_power(); ++bl) {
    bridge_l = s.bridge(p0.symbol_at(-m - 1 - bl), x.symbol_at(-m), bl);
    if (bridge_l) break;
  }
  for (; br <= s.mixing_power(); ++br) {
    bridge_r = s.bridge(x.symbol_at(m), p0.symbol_at(m + 1 + br), br);
    if (bridge_r) break;
  }
  if (!bridge_l || !bridge_r)
    throw BudgetExceeded("no admissible splice onto the base orbit at radius " +
                         std::to_string(m));
  const int k = sc.base_point().period();
  const long start = -m - bl;
  Word left(static_cast<std::size_t>(k), '1');
  Word right(static_cast<std::size_t>(k), '1');
  for (int t = 0; t < k; ++t) {
    left[static_cast<std::size_t>(t)] = p0.symbol_at(start + t - k);
    right[static_cast<std::size_t>(t)] = p0.symbol_at(m + br + 1 + t);
  }
  const SymbolicPoint spliced =
      s.point(left, *bridge_l + x.window(-m, m) + *bridge_r, right, start);
  const DualValue dual = cbar_at(sc.a(), sc.b_conj(), p0, sc.base_value(), spliced);
  return ExtendedValue{dual.value,
                       sc.holder_constant() * std::pow(delta, sc.beta()), false,
                       spliced};
}

CohomologyReport verify_cohomology(const SynthesizedConjugacy& sc, int samples,
                                   int n_max, std::uint64_t seed, double tol) {
  if (samples < 1 || n_max < 0)
    throw InvalidInput("cohomology check needs samples >= 1 and n_max >= 0");
  DetRng rng(seed);
  CohomologyReport report{0.0, samples, n_max, tol, true};
  const auto& entries = sc.entries();
  for (int t = 0; t < samples; ++t) {
    const auto& [x, cx] = entries[static_cast<std::size_t>(rng.below(entries.size()))];
    const long n =
        -n_max + static_cast<long>(rng.below(2 * static_cast<std::uint64_t>(n_max) + 1));
    // f^n x leaves the base phase when the base period does not divide n, so
    // the value there goes through the splice-based extension
    const SymbolicPoint fnx = shift(x, n);
    const InvertibleOperator cfnx =
        evaluate_extended(sc, fnx, std::pow(sc.a().shift().nu(), 48)).value;
    const InvertibleOperator an = sc.a().iterate(x, n);
    const InvertibleOperator rhs =
        cfnx.compose(sc.b().iterate(x, n)).compose(cx.inverse());
    const double residual = spectral_norm(an.matrix() - rhs.matrix()) /
                            spectral_norm(an.matrix());
    report.max_residual = std::max(report.max_residual, residual);
  }
  report.pass = report.max_residual < tol;
  return report;
}

StepRelationReport verify_step_relation(const SynthesizedConjugacy& sc,
                                        int samples, std::uint64_t seed,
                                        double tol) {
  if (samples < 1) throw InvalidInput("step relation check needs samples >= 1");
  const ShiftSpec& s = sc.a().shift();
  const SymbolicPoint& p0 = sc.base_point().point();
  const int k = sc.base_point().period();
  const SymbolicPoint q = shift(p0, k - 1);
  DetRng rng(seed);
  StepRelationReport report{0.0, samples, tol, true};
  for (int t = 0; t < samples; ++t) {
    const long j = 8 + (t % 5);
    const auto core = s.bridge(q.symbol_at(-j - 1), p0.symbol_at(j + 1),
                               static_cast<int>(2 * j + 1), &rng);
    if (!core)
      throw BudgetExceeded("no admissible sample in the intersected leaves");
    Word left(static_cast<std::size_t>(k), '1');
    Word right(static_cast<std::size_t>(k), '1');
    for (int i = 0; i < k; ++i) {
      left[static_cast<std::size_t>(i)] = q.symbol_at(-j + i - k);
      right[static_cast<std::size_t>(i)] = p0.symbol_at(j + 1 + i);
    }
    const SymbolicPoint x = s.point(left, *core, right, -j);
    // Deep splice: with locally constant data the extension stabilizes, so a
    // radius far beyond the sample's free window evaluates C to machine
    // precision rather than to the generic Holder bound.
    const double delta = std::pow(s.nu(), 48);
    const ExtendedValue cx = evaluate_extended(sc, x, delta);
    const ExtendedValue cfx = evaluate_extended(sc, shift(x, 1), delta);
    const InvertibleOperator& ax = sc.a().evaluate(x);
    const InvertibleOperator rhs =
        cfx.value.compose(sc.b().evaluate(x)).compose(cx.value.inverse());
    const double residual = spectral_norm(ax.matrix() - rhs.matrix()) /
                            spectral_norm(ax.matrix());
    report.max_residual = std::max(report.max_residual, residual);
  }
  report.pass = report.max_residual < tol;
  return report;
}

}  // namespace cocyc
