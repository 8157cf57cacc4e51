#include "cocyc/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "cocyc/bunching.hpp"
#include "cocyc/cocycle.hpp"
#include "cocyc/conjugacy.hpp"
#include "cocyc/errors.hpp"
#include "cocyc/holonomy.hpp"
#include "cocyc/lyapunov.hpp"
#include "cocyc/report.hpp"
#include "cocyc/rng.hpp"
#include "cocyc/shift_space.hpp"

namespace cocyc {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kScenarioSchema = "cocyc-scenario-1";
constexpr const char* kReportSchema = "cocyc-report-1";

[[noreturn]] void fail(const std::string& msg) { throw InvalidInput(msg); }

const ojson& field(const ojson& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) fail(std::string("missing field '") + name + "'");
  return *it;
}

double num_field(const ojson& j, const char* name) {
  const ojson& v = field(j, name);
  if (!v.is_number()) fail(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

long int_field(const ojson& j, const char* name, long fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    fail(std::string("field '") + name + "' must be an integer");
  return it->get<long>();
}

double real_field(const ojson& j, const char* name, double fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (!it->is_number()) fail(std::string("field '") + name + "' must be a number");
  return it->get<double>();
}

std::string str_field(const ojson& j, const char* name, const std::string& fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (!it->is_string()) fail(std::string("field '") + name + "' must be a string");
  return it->get<std::string>();
}

Eigen::MatrixXd parse_matrix(const ojson& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(what + " rows must be nonempty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) fail(what + " is not rectangular");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) fail(what + " has a non-numeric entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j[i][c].get<double>();
    }
  }
  return m;
}

ojson matrix_json(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(round_sig15(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ojson number_list(const std::vector<double>& v) {
  ojson out = ojson::array();
  for (double x : v) out.push_back(round_sig15(x));
  return out;
}

LocallyConstantGenerator parse_generator(const ojson& j, double beta,
                                         const std::string& what) {
  const long radius = int_field(j, "window_radius", -1);
  if (radius < 0) fail(what + ": missing or negative window_radius");
  const ojson& table_j = field(j, "table");
  if (!table_j.is_object()) fail(what + ": table must be an object keyed by words");
  std::map<Word, InvertibleOperator> table;
  for (const auto& [word, mj] : table_j.items())
    table.emplace(word, InvertibleOperator(
                            parse_matrix(mj, what + " table entry '" + word + "'")));
  return LocallyConstantGenerator(static_cast<int>(radius), beta, std::move(table));
}

struct Parsed {
  ShiftSpec shift;
  double beta;
  std::string task;
  std::uint64_t seed;
  ojson params;
  std::map<std::string, CocycleInstance> cocycles;
  // conj generators of cocycles defined via the coboundary constructor
  std::map<std::string, LocallyConstantGenerator> conj_of;
};

ShiftSpec parse_shift(const ojson& j) {
  const ojson& sj = field(j, "shift");
  const long k = int_field(sj, "alphabet", -1);
  if (k < 1) fail("shift.alphabet must be a positive integer");
  const ojson& adj = field(sj, "adjacency");
  if (!adj.is_array() || adj.size() != static_cast<std::size_t>(k))
    fail("shift.adjacency must be a k x k array of 0/1 rows");
  std::vector<std::uint8_t> entries;
  entries.reserve(static_cast<std::size_t>(k * k));
  for (const auto& row : adj) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(k))
      fail("shift.adjacency must be a k x k array of 0/1 rows");
    for (const auto& e : row) {
      if (!e.is_number_integer() || (e.get<long>() != 0 && e.get<long>() != 1))
        fail("shift.adjacency entries must be 0 or 1");
      entries.push_back(static_cast<std::uint8_t>(e.get<long>()));
    }
  }
  return ShiftSpec(static_cast<int>(k), std::move(entries),
                   real_field(sj, "nu", 0.5));
}

Parsed parse_scenario(const std::string& bytes) {
  ojson j;
  try {
    j = ojson::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (str_field(j, "schema", kScenarioSchema) != kScenarioSchema)
    fail("unsupported scenario schema");
  if (!field(j, "task").is_string()) fail("field 'task' must be a string");
  const std::string task = j["task"].get<std::string>();
  const double beta = num_field(j, "beta");
  Parsed p{parse_shift(j), beta, task,
           static_cast<std::uint64_t>(int_field(j, "seed", 0)),
           j.value("params", ojson::object()), {}, {}};

  const ojson& defs = field(j, "cocycles");
  if (!defs.is_object()) fail("cocycles must be an object of named definitions");
  // two passes: direct tables first, then coboundary definitions
  for (const auto& [name, dj] : defs.items()) {
    if (dj.contains("coboundary")) continue;
    p.cocycles.emplace(name, CocycleInstance(p.shift, parse_generator(
                                                          dj, beta, "cocycle " + name)));
  }
  for (const auto& [name, dj] : defs.items()) {
    if (!dj.contains("coboundary")) continue;
    const ojson& cj = dj["coboundary"];
    const std::string base = field(cj, "base").get<std::string>();
    auto it = p.cocycles.find(base);
    if (it == p.cocycles.end())
      fail("cocycle " + name + ": coboundary base '" + base + "' is not defined");
    LocallyConstantGenerator conj =
        parse_generator(field(cj, "conj"), beta, "cocycle " + name + " conj");
    p.cocycles.emplace(name, make_coboundary(it->second, conj));
    p.conj_of.emplace(name, std::move(conj));
  }
  return p;
}

const CocycleInstance& named_cocycle(const Parsed& p, const std::string& name) {
  auto it = p.cocycles.find(name);
  if (it == p.cocycles.end()) fail("unknown cocycle '" + name + "'");
  return it->second;
}

struct TaskOutcome {
  std::string status = "pass";
  ojson checks = ojson::array();
  ojson results = ojson::object();
  std::vector<std::pair<std::string, std::string>> csvs;
};

void add_check(TaskOutcome& out, ojson check) {
  const std::string st = check.at("status").get<std::string>();
  if (st == "violation" && out.status != "violation") out.status = "violation";
  if (st == "undetermined" && out.status == "pass") out.status = "undetermined";
  out.checks.push_back(std::move(check));
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

const char* mode_name(CertificateMode m) {
  switch (m) {
    case CertificateMode::direct: return "direct";
    case CertificateMode::periodic_evidence: return "periodic_evidence";
    default: return "transferred";
  }
}

ojson certificate_json(const BunchingCertificate& cert) {
  return ojson{{"theta", round_sig15(cert.theta)},
               {"L", round_sig15(cert.L)},
               {"N", cert.N},
               {"margin", round_sig15(cert.margin)},
               {"mode", mode_name(cert.mode)}};
}

// ---- certify ---------------------------------------------------------------

TaskOutcome run_certify(const Parsed& p, std::uint64_t /*seed*/, int /*workers*/) {
  TaskOutcome out;
  const std::string name = str_field(p.params, "cocycle", "");
  if (name.empty()) fail("certify: params.cocycle is required");
  const CocycleInstance& c = named_cocycle(p, name);
  const std::string mode = str_field(p.params, "mode", "direct");
  out.results["cocycle"] = name;
  out.results["mode"] = mode;

  if (mode == "direct") {
    const int n_max = static_cast<int>(int_field(p.params, "n_max", 20));
    const UniformSearchResult search = find_uniform_N(c, n_max);
    out.results["n_max"] = n_max;
    out.results["max_gap_by_n"] = number_list(search.max_gap_by_n);
    if (!search.certificate) {
      add_check(out, ojson{{"name", "uniform_contraction"},
                           {"status", "undetermined"},
                           {"witness", ojson{{"word", search.worst_word},
                                             {"gap", round_sig15(search.worst_gap)}}}});
      return out;
    }
    const BunchingCertificate& cert = *search.certificate;
    out.results["certificate"] = certificate_json(cert);
    add_check(out, ojson{{"name", "uniform_contraction"},
                         {"status", "pass"},
                         {"N", cert.N},
                         {"margin", round_sig15(cert.margin)}});
    const int horizon = static_cast<int>(int_field(p.params, "horizon", 0));
    if (horizon > 0) {
      const DirectCheckReport dc = direct_check(c, cert, horizon);
      ojson check{{"name", "direct_check"},
                  {"status", dc.pass ? "pass" : "violation"},
                  {"horizon", dc.horizon},
                  {"max_ratio", round_sig15(dc.max_ratio)}};
      if (dc.first_violation)
        check["witness"] = ojson{{"word", dc.first_violation->word},
                                 {"n", dc.first_violation->n},
                                 {"lhs", round_sig15(dc.first_violation->lhs)},
                                 {"bound", round_sig15(dc.first_violation->bound)}};
      add_check(out, std::move(check));
      out.results["direct_check"] = ojson{{"horizon", dc.horizon},
                                          {"max_ratio", round_sig15(dc.max_ratio)}};
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < search.max_gap_by_n.size(); ++i)
      rows.push_back({std::to_string(i + 1), format_number(search.max_gap_by_n[i])});
    out.csvs.emplace_back("gaps.csv", csv_table({"n", "max_gap"}, rows));
    return out;
  }

  if (mode != "periodic") fail("certify: mode must be 'direct' or 'periodic'");
  const int max_period = static_cast<int>(int_field(p.params, "max_period", 8));
  const PeriodicPremiseReport rep = periodic_premise_check(c, max_period);
  out.results["max_period"] = max_period;
  out.results["max_rate_by_k"] = number_list(rep.max_rate_by_k);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < rep.max_rate_by_k.size(); ++i)
    rows.push_back({std::to_string(i + 1), format_number(rep.max_rate_by_k[i])});
  out.csvs.emplace_back("premise_rates.csv", csv_table({"k", "max_rate"}, rows));
  if (rep.status == PremiseStatus::evidence) {
    out.results["theta_tilde"] = round_sig15(rep.theta_tilde);
    out.results["L_tilde"] = round_sig15(rep.L_tilde);
    add_check(out, ojson{{"name", "periodic_premise"},
                         {"status", "pass"},
                         {"theta_tilde", round_sig15(rep.theta_tilde)},
                         {"L_tilde", round_sig15(rep.L_tilde)}});
    return out;
  }
  ojson check{{"name", "periodic_premise"},
              {"status", rep.status == PremiseStatus::violation ? "violation"
                                                                : "undetermined"}};
  if (rep.violation)
    check["witness"] = ojson{{"orbit_word", rep.violation->orbit_word},
                             {"k", rep.violation->k},
                             {"gap", round_sig15(rep.violation->gap)}};
  add_check(out, std::move(check));
  return out;
}

// ---- lyapunov --------------------------------------------------------------

MarkovMeasure measure_from_params(const Parsed& p, const ojson& params) {
  auto it = params.find("measure");
  if (it == params.end() || (it->is_string() && it->get<std::string>() == "parry"))
    return parry_measure(p.shift);
  if (it->is_object() && it->contains("transition"))
    return markov_measure(p.shift,
                          parse_matrix((*it)["transition"], "measure.transition"));
  fail("lyapunov: measure must be \"parry\" or {\"transition\": rows}");
}

TaskOutcome run_lyapunov(const Parsed& p, std::uint64_t seed, int workers) {
  TaskOutcome out;
  const std::string name = str_field(p.params, "cocycle", "");
  if (name.empty()) fail("lyapunov: params.cocycle is required");
  const CocycleInstance& c = named_cocycle(p, name);
  const MarkovMeasure mu = measure_from_params(p, p.params);
  SamplingPlan plan;
  plan.n = int_field(p.params, "n", 2000);
  plan.trials = static_cast<int>(int_field(p.params, "trials", 50));
  plan.seed = seed;
  plan.workers = workers;
  const ChiEstimate chi = chi_exponent(c, mu, plan);
  const ExponentEstimate& est = chi.base;
  const int max_period = static_cast<int>(int_field(p.params, "max_period", 2));
  const auto orbits = periodic_approximants(c, max_period);

  out.results["cocycle"] = name;
  out.results["entropy"] = round_sig15(mu.entropy);
  out.results["n"] = est.n;
  out.results["trials"] = est.trials;
  out.results["lambda_plus"] = round_sig15(est.lambda_plus);
  out.results["stderr_plus"] = round_sig15(est.stderr_plus);
  out.results["lambda_minus"] = round_sig15(est.lambda_minus);
  out.results["stderr_minus"] = round_sig15(est.stderr_minus);
  out.results["chi"] = round_sig15(chi.value);
  out.results["chi_stderr"] = round_sig15(chi.se);
  ojson orbit_rows = ojson::array();
  for (const OrbitExponents& o : orbits)
    orbit_rows.push_back(ojson{{"orbit_word", o.orbit_word},
                               {"k", o.period},
                               {"plus", round_sig15(o.plus)},
                               {"minus", round_sig15(o.minus)}});
  out.results["approximants"] = std::move(orbit_rows);

  std::vector<std::vector<std::string>> arows;
  for (const OrbitExponents& o : orbits)
    arows.push_back({o.orbit_word, std::to_string(o.period), format_number(o.plus),
                     format_number(o.minus)});
  out.csvs.emplace_back(
      "approximants.csv",
      csv_table({"orbit_word", "k", "plus_value", "minus_value"}, arows));
  std::vector<std::vector<std::string>> trows;
  for (int t = 0; t < est.trials; ++t)
    trows.push_back({std::to_string(t),
                     format_number(est.trial_plus[static_cast<std::size_t>(t)]),
                     format_number(est.trial_minus[static_cast<std::size_t>(t)])});
  out.csvs.emplace_back("trials.csv", csv_table({"trial", "plus", "minus"}, trows));

  add_check(out, ojson{{"name", "exponent_order"},
                       {"status", est.lambda_plus >= est.lambda_minus - 1e-12
                                      ? "pass"
                                      : "violation"}});
  auto ej = p.params.find("expect");
  if (ej != p.params.end()) {
    const double sigmas = real_field(*ej, "sigmas", 3.0);
    const auto within = [&](const char* check_name, double value, double se,
                            const char* target_name) {
      if (!ej->contains(target_name)) return;
      const double target = num_field(*ej, target_name);
      // the 1e-12 floor keeps zero-dispersion estimates (constant cocycles)
      // comparable against exact targets
      const double allowed = sigmas * se + 1e-12;
      add_check(out, ojson{{"name", check_name},
                           {"status", std::abs(value - target) <= allowed
                                          ? "pass"
                                          : "violation"},
                           {"value", round_sig15(value)},
                           {"target", round_sig15(target)},
                           {"allowed", round_sig15(allowed)}});
    };
    within("lambda_plus_within", est.lambda_plus, est.stderr_plus, "lambda_plus");
    within("lambda_minus_within", est.lambda_minus, est.stderr_minus, "lambda_minus");
    within("chi_within", chi.value, chi.se, "chi");
    if (ej->contains("approximant_value")) {
      const double target = num_field(*ej, "approximant_value");
      bool found = false;
      for (const OrbitExponents& o : orbits)
        if (std::abs(o.plus - target) <= 1e-12 && std::abs(o.minus - target) <= 1e-12)
          found = true;
      add_check(out, ojson{{"name", "approximant_contains"},
                           {"status", found ? "pass" : "violation"},
                           {"target", round_sig15(target)}});
    }
  }
  return out;
}

// ---- holonomy-verify -------------------------------------------------------

Word random_walk_word(const ShiftSpec& s, int length, DetRng& rng) {
  Word w;
  w.reserve(static_cast<std::size_t>(length));
  char cur = static_cast<char>('1' + rng.below(static_cast<std::uint64_t>(
                                        s.alphabet_size())));
  w.push_back(cur);
  for (int i = 1; i < length; ++i) {
    std::vector<char> nxt;
    for (int sym = 0; sym < s.alphabet_size(); ++sym) {
      const char ch = static_cast<char>('1' + sym);
      if (s.allowed(cur, ch)) nxt.push_back(ch);
    }
    cur = nxt[static_cast<std::size_t>(rng.below(nxt.size()))];
    w.push_back(cur);
  }
  return w;
}

// Partner sharing all symbols at i >= m (stable) or i <= m (unstable), with
// the window [-radius, radius] regenerated on the free side.
SymbolicPoint leaf_partner(const ShiftSpec& s, const Word& xw, int radius, long m,
                           LeafKind kind, DetRng& rng) {
  const std::size_t mi = static_cast<std::size_t>(m + radius);
  if (kind == LeafKind::stable) {
    const char from =
        static_cast<char>('1' + rng.below(static_cast<std::uint64_t>(s.alphabet_size())));
    const auto part = s.bridge(from, xw[mi], static_cast<int>(mi), &rng);
    if (!part) fail("leaf partner sampling failed");
    return s.point_from_window(*part + xw.substr(mi), -radius);
  }
  Word w = xw.substr(0, mi + 1);
  char cur = xw[mi];
  while (w.size() < xw.size()) {
    std::vector<char> nxt;
    for (int sym = 0; sym < s.alphabet_size(); ++sym) {
      const char ch = static_cast<char>('1' + sym);
      if (s.allowed(cur, ch)) nxt.push_back(ch);
    }
    cur = nxt[static_cast<std::size_t>(rng.below(nxt.size()))];
    w.push_back(cur);
  }
  return s.point_from_window(w, -radius);
}

TaskOutcome run_holonomy_verify(const Parsed& p, std::uint64_t seed, int workers) {
  (void)workers;
  TaskOutcome out;
  const std::string name = str_field(p.params, "cocycle", "");
  if (name.empty()) fail("holonomy-verify: params.cocycle is required");
  const CocycleInstance& c = named_cocycle(p, name);
  const ShiftSpec& s = p.shift;
  const int pairs = static_cast<int>(int_field(p.params, "pairs", 200));
  const double tol = real_field(p.params, "tol", 1e-10);
  const int n_max = static_cast<int>(int_field(p.params, "n_max", 20));

  const UniformSearchResult search = find_uniform_N(c, n_max);
  if (!search.certificate) {
    add_check(out, ojson{{"name", "certificate"},
                         {"status", "undetermined"},
                         {"witness", ojson{{"word", search.worst_word},
                                           {"gap", round_sig15(search.worst_gap)}}}});
    return out;
  }
  const BunchingCertificate& cert = *search.certificate;
  out.results["cocycle"] = name;
  out.results["certificate"] = certificate_json(cert);
  out.results["pairs"] = pairs;

  const int radius = 20;
  const int r = c.window_radius();
  DetRng rng(seed);
  double exact_max = 0.0, comp_max = 0.0, invr_max = 0.0, h3_max = 0.0,
         h3u_max = 0.0;
  double near_ratio = 0.0, far_ratio = 0.0;
  int near_count = 0, far_count = 0;
  for (int t = 0; t < pairs; ++t) {
    const Word xw = random_walk_word(s, 2 * radius + 1, rng);
    const SymbolicPoint x = s.point_from_window(xw, -radius);
    const long m = 1 + static_cast<long>(rng.below(5));
    const SymbolicPoint y = leaf_partner(s, xw, radius, m, LeafKind::stable, rng);
    const SymbolicPoint z = leaf_partner(s, xw, radius, m, LeafKind::stable, rng);
    const long mu_ = -1 - static_cast<long>(rng.below(5));
    const SymbolicPoint yu = leaf_partner(s, xw, radius, mu_, LeafKind::unstable, rng);
    const SymbolicPoint zu = leaf_partner(s, xw, radius, mu_, LeafKind::unstable, rng);

    // exactness: the finite product has stabilized, so deeper truncations
    // give the same operator
    const HolonomyMap hs = stable_holonomy(c, cert, x, y);
    {
      const long d = hs.iterations_used + r + 5;
      const InvertibleOperator fin =
          c.iterate(y, d).inverse().compose(c.iterate(x, d));
      exact_max = std::max(exact_max,
                           spectral_norm(hs.op.matrix() - fin.matrix()));
    }
    const HolonomyMap hu = unstable_holonomy(c, cert, x, yu);
    {
      const long d = hu.iterations_used + r + 5;
      const InvertibleOperator fin =
          c.iterate(yu, -d).inverse().compose(c.iterate(x, -d));
      exact_max = std::max(exact_max,
                           spectral_norm(hu.op.matrix() - fin.matrix()));
    }

    // H2: composition and inverse
    const HolonomyMap hyz = stable_holonomy(c, cert, y, z);
    const HolonomyMap hxz = stable_holonomy(c, cert, x, z);
    comp_max = std::max(comp_max, spectral_norm(hyz.op.compose(hs.op).matrix() -
                                                hxz.op.matrix()));
    const HolonomyMap hyx = stable_holonomy(c, cert, y, x);
    invr_max = std::max(invr_max, spectral_norm(hs.op.inverse().matrix() -
                                                hyx.op.matrix()));
    const HolonomyMap huyz = unstable_holonomy(c, cert, yu, zu);
    const HolonomyMap huxz = unstable_holonomy(c, cert, x, zu);
    comp_max = std::max(comp_max, spectral_norm(huyz.op.compose(hu.op).matrix() -
                                                huxz.op.matrix()));

    // H3 / H3'
    const long n = 1 + static_cast<long>(rng.below(10));
    const HolonomyMap hs_n = stable_holonomy(c, cert, shift(x, n), shift(y, n));
    const InvertibleOperator push =
        c.iterate(y, n).inverse().compose(hs_n.op).compose(c.iterate(x, n));
    h3_max = std::max(h3_max, spectral_norm(hs.op.matrix() - push.matrix()));
    const HolonomyMap hu_n = unstable_holonomy(c, cert, shift(x, -n), shift(yu, -n));
    const InvertibleOperator pull =
        c.iterate(yu, -n).inverse().compose(hu_n.op).compose(c.iterate(x, -n));
    h3u_max = std::max(h3u_max, spectral_norm(hu.op.matrix() - pull.matrix()));

    // H4 ratio buckets by n(x, y)
    const auto classify = [&](const SymbolicPoint& a, const SymbolicPoint& b,
                              const Eigen::MatrixXd& h) {
      const auto first = first_disagreement(a, b);
      if (!first) return;
      const long nxy = std::abs(*first);
      const double dist = s.distance(a, b);
      const double ratio =
          spectral_norm(h - Eigen::MatrixXd::Identity(c.dim(), c.dim())) /
          std::pow(dist, c.beta());
      if (nxy >= 1 && nxy <= 5) {
        near_ratio = std::max(near_ratio, ratio);
        ++near_count;
      } else if (nxy >= 10) {
        far_ratio = std::max(far_ratio, ratio);
        ++far_count;
      }
    };
    classify(x, y, hs.op.matrix());
    classify(x, yu, hu.op.matrix());
    // far-bucket pair: agreement beyond |i| = 12 on the stable side
    const SymbolicPoint yfar = leaf_partner(s, xw, radius, -12, LeafKind::stable, rng);
    const HolonomyMap hfar = stable_holonomy(c, cert, x, yfar);
    classify(x, yfar, hfar.op.matrix());
  }

  const auto residual_check = [&](const char* cname, double value) {
    add_check(out, ojson{{"name", cname},
                         {"status", value < tol ? "pass" : "violation"},
                         {"max_residual", round_sig15(value)},
                         {"tolerance", round_sig15(tol)}});
  };
  residual_check("exactness", exact_max);
  residual_check("h2_composition", comp_max);
  residual_check("h2_inverse", invr_max);
  residual_check("h3_stable", h3_max);
  residual_check("h3_unstable", h3u_max);
  add_check(out, ojson{{"name", "h4_uniform"},
                       {"status", far_ratio <= near_ratio + 1e-12 ? "pass"
                                                                  : "violation"},
                       {"near_ratio", round_sig15(near_ratio)},
                       {"far_ratio", round_sig15(far_ratio)},
                       {"near_count", near_count},
                       {"far_count", far_count}});
  out.results["h4_constant"] = round_sig15(near_ratio);
  return out;
}

// ---- conjugacy-synth -------------------------------------------------------

TaskOutcome run_conjugacy(const Parsed& p, std::uint64_t seed, int workers) {
  TaskOutcome out;
  const std::string a_name = str_field(p.params, "a", "");
  const std::string b_name = str_field(p.params, "b", "");
  if (a_name.empty() || b_name.empty())
    fail("conjugacy-synth: params.a and params.b are required");
  const CocycleInstance& a = named_cocycle(p, a_name);
  const CocycleInstance& b = named_cocycle(p, b_name);
  const int max_period = static_cast<int>(int_field(p.params, "max_period", 8));
  const int budget = static_cast<int>(int_field(p.params, "budget", 8));
  const double defect_tol = real_field(p.params, "defect_tol", 1e-8);
  const double tol = real_field(p.params, "tol", 1e-8);
  const int samples = static_cast<int>(int_field(p.params, "samples", 100));
  const int n_max = static_cast<int>(int_field(p.params, "n_max", 10));
  const int step_samples = static_cast<int>(int_field(p.params, "step_samples", 50));
  out.results["a"] = a_name;
  out.results["b"] = b_name;
  out.results["max_period"] = max_period;

  IntertwinerSolveOptions solve_opts;
  solve_opts.seed = derive_seed(seed, 7);
  const PeriodicDataScan scan = scan_periodic_data(a, b, max_period, solve_opts);
  std::vector<std::vector<std::string>> prows;
  for (const PeriodicConjugacyDatum& d : scan.data)
    prows.push_back({d.point.word(), std::to_string(d.period),
                     format_number(d.bound_check), format_number(d.residual),
                     d.equal_blocks ? "1" : "0"});
  out.csvs.emplace_back(
      "periodic_data.csv",
      csv_table({"orbit_word", "period", "bound_check", "residual", "equal_blocks"},
                prows));
  if (scan.failure) {
    add_check(out, ojson{{"name", "periodic_data"},
                         {"status", "violation"},
                         {"witness", ojson{{"orbit_word", scan.failure->orbit_word},
                                           {"period", scan.failure->period},
                                           {"reason", scan.failure->reason}}}});
    return out;
  }
  out.results["m_bound"] = round_sig15(scan.m_bound);
  out.results["holder_diagnostic"] = round_sig15(scan.holder_diagnostic);
  double max_scan_residual = 0.0;
  for (const PeriodicConjugacyDatum& d : scan.data)
    max_scan_residual = std::max(max_scan_residual, d.residual);
  add_check(out, ojson{{"name", "periodic_data"},
                       {"status", max_scan_residual <= 1e-8 ? "pass" : "violation"},
                       {"orbits", static_cast<long>(scan.data.size())},
                       {"max_residual", round_sig15(max_scan_residual)},
                       {"m_bound", round_sig15(scan.m_bound)}});

  // base point and base transfer value
  const Word p0_word = str_field(p.params, "p0", scan.base_word);
  const PeriodicOrbitPoint p0 = p.shift.periodic_point(p0_word);
  std::optional<InvertibleOperator> c_p0;
  const ojson& cj = p.params.contains("c_p0") ? p.params["c_p0"] : ojson("scan");
  if (cj.is_string() && cj.get<std::string>() == "scan") {
    for (const PeriodicConjugacyDatum& d : scan.data)
      if (d.point.word() == p0_word) c_p0 = d.c_p;
    if (!c_p0) fail("conjugacy-synth: p0 '" + p0_word + "' not among scanned data");
  } else if (cj.is_string() && cj.get<std::string>() == "generating") {
    auto it = p.conj_of.find(a_name);
    if (it == p.conj_of.end())
      fail("conjugacy-synth: c_p0 'generating' needs a coboundary-defined cocycle a");
    const int rc = it->second.window_radius();
    c_p0 = it->second.at(p0.point().window(-rc, rc));
  } else if (cj.is_array()) {
    c_p0 = InvertibleOperator(parse_matrix(cj, "params.c_p0"));
  } else {
    fail("conjugacy-synth: c_p0 must be \"scan\", \"generating\", or a matrix");
  }

  // bunching certificate for a (the synthesis license)
  const UniformSearchResult search =
      find_uniform_N(a, static_cast<int>(int_field(p.params, "n_max_bunching", 20)));
  if (!search.certificate) {
    add_check(out, ojson{{"name", "bunching"},
                         {"status", "undetermined"},
                         {"witness", ojson{{"word", search.worst_word},
                                           {"gap", round_sig15(search.worst_gap)}}}});
    return out;
  }

  try {
    const SynthesizedConjugacy sc =
        synth_homoclinic(a, b, *search.certificate, p0, *c_p0, budget, defect_tol,
                         workers);
    out.results["p0"] = p0_word;
    out.results["c_p0"] = matrix_json(sc.base_value().matrix());
    out.results["budget"] = budget;
    out.results["entries_count"] = static_cast<long>(sc.entries().size());
    out.results["holder_constant"] = round_sig15(sc.holder_constant());
    out.results["max_defect"] = round_sig15(sc.max_defect());
    ojson entries = ojson::array();
    for (const auto& [pt, op] : sc.entries())
      entries.push_back(ojson{{"point", pt.str()}, {"matrix", matrix_json(op.matrix())}});
    out.results["entries"] = std::move(entries);
    add_check(out, ojson{{"name", "defect"},
                         {"status", "pass"},
                         {"max_defect", round_sig15(sc.max_defect())},
                         {"tolerance", round_sig15(defect_tol)}});

    const CohomologyReport coh =
        verify_cohomology(sc, samples, n_max, derive_seed(seed, 11), tol);
    add_check(out, ojson{{"name", "cohomology"},
                         {"status", coh.pass ? "pass" : "violation"},
                         {"max_residual", round_sig15(coh.max_residual)},
                         {"samples", coh.samples},
                         {"n_max", coh.n_max},
                         {"tolerance", round_sig15(coh.tol)}});
    out.results["cohomology_max_residual"] = round_sig15(coh.max_residual);

    const StepRelationReport step =
        verify_step_relation(sc, step_samples, derive_seed(seed, 13), tol);
    add_check(out, ojson{{"name", "step_relation"},
                         {"status", step.pass ? "pass" : "violation"},
                         {"max_residual", round_sig15(step.max_residual)},
                         {"samples", step.samples},
                         {"tolerance", round_sig15(step.tol)}});
    out.results["step_relation_max_residual"] = round_sig15(step.max_residual);

    // round-trip check: when a was built as a coboundary of b, the synthesis
    // must reproduce the generating transfer map pointwise
    if (p.params.value("expect_generating", false)) {
      auto it = p.conj_of.find(a_name);
      if (it == p.conj_of.end())
        fail("conjugacy-synth: expect_generating needs a coboundary-defined a");
      const int rc = it->second.window_radius();
      double worst = 0.0;
      for (const auto& [pt, op] : sc.entries())
        worst = std::max(worst,
                         metric_d(op, it->second.at(pt.window(-rc, rc))));
      add_check(out, ojson{{"name", "generating_roundtrip"},
                           {"status", worst < tol ? "pass" : "violation"},
                           {"max_distance", round_sig15(worst)},
                           {"points", static_cast<long>(sc.entries().size())},
                           {"tolerance", round_sig15(tol)}});
      out.results["generating_roundtrip_max"] = round_sig15(worst);
    }
  } catch (const DefectExceeded& e) {
    add_check(out, ojson{{"name", "defect"},
                         {"status", "violation"},
                         {"witness", ojson{{"reason", e.what()}}}});
  }
  return out;
}

// ---- verify ----------------------------------------------------------------

TaskOutcome run_verify(const Parsed& p, std::uint64_t seed, int /*workers*/) {
  TaskOutcome out;
  const std::string name = str_field(p.params, "cocycle", "");
  if (name.empty()) fail("verify: params.cocycle is required");
  const CocycleInstance& c = named_cocycle(p, name);
  const ShiftSpec& s = p.shift;
  const int samples = static_cast<int>(int_field(p.params, "samples", 500));
  const int n_max = static_cast<int>(int_field(p.params, "n_max", 20));
  const double tol = real_field(p.params, "tol", 1e-12);
  const int radius = n_max + c.window_radius() + 4;
  DetRng rng(seed);
  double eq_max = 0.0, inv_max = 0.0, q_max = 0.0;
  for (int t = 0; t < samples; ++t) {
    const Word w = random_walk_word(s, 2 * radius + 1, rng);
    const SymbolicPoint x = s.point_from_window(w, -radius);
    const long n = -n_max + static_cast<long>(rng.below(2 * static_cast<std::uint64_t>(n_max) + 1));
    const long k = -n_max + static_cast<long>(rng.below(2 * static_cast<std::uint64_t>(n_max) + 1));
    const InvertibleOperator lhs = c.iterate(x, n + k);
    const InvertibleOperator rhs = c.iterate(shift(x, k), n).compose(c.iterate(x, k));
    eq_max = std::max(eq_max, spectral_norm(lhs.matrix() - rhs.matrix()) /
                                  spectral_norm(lhs.matrix()));
    const InvertibleOperator direct = c.iterate(x, -std::abs(n));
    const InvertibleOperator via_inv = c.iterate(shift(x, -std::abs(n)), std::abs(n)).inverse();
    inv_max = std::max(inv_max, spectral_norm(direct.matrix() - via_inv.matrix()) /
                                    std::max(1.0, spectral_norm(direct.matrix())));
    if (n != 0) {
      const double q1 = c.q_distortion(x, n);
      const double q2 = c.q_distortion(shift(x, n), -n);
      q_max = std::max(q_max, std::abs(q1 - q2) / q1);
    }
  }
  out.results["cocycle"] = name;
  out.results["samples"] = samples;
  out.results["n_max"] = n_max;
  const auto residual_check = [&](const char* cname, double value) {
    add_check(out, ojson{{"name", cname},
                         {"status", value <= tol ? "pass" : "violation"},
                         {"max_residual", round_sig15(value)},
                         {"tolerance", round_sig15(tol)}});
  };
  residual_check("cocycle_equation", eq_max);
  residual_check("inverse_consistency", inv_max);
  residual_check("distortion_symmetry", q_max);
  return out;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

RunResult run_scenario_file(const std::filesystem::path& scenario_path,
                            const std::string& expected_task,
                            const RunOptions& opts) {
  std::ifstream in(scenario_path, std::ios::binary);
  if (!in) fail("cannot read scenario file " + scenario_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();

  Parsed p = parse_scenario(bytes);
  if (!expected_task.empty() && p.task != expected_task)
    fail("scenario task '" + p.task + "' does not match subcommand '" +
         expected_task + "'");
  const std::uint64_t seed = opts.seed.value_or(p.seed);
  if (opts.workers < 1) fail("workers must be >= 1");

  TaskOutcome outcome;
  if (p.task == "certify") outcome = run_certify(p, seed, opts.workers);
  else if (p.task == "lyapunov") outcome = run_lyapunov(p, seed, opts.workers);
  else if (p.task == "holonomy-verify") outcome = run_holonomy_verify(p, seed, opts.workers);
  else if (p.task == "conjugacy-synth") outcome = run_conjugacy(p, seed, opts.workers);
  else if (p.task == "verify") outcome = run_verify(p, seed, opts.workers);
  else fail("unknown task '" + p.task + "'");

  const int exit_code = outcome.status == "pass" ? 0
                        : outcome.status == "violation" ? 1
                                                        : 2;
  ojson report{{"schema", kReportSchema},
               {"task", p.task},
               {"scenario_digest", fnv1a64_hex(bytes)},
               {"seed", seed},
               {"status", outcome.status},
               {"exit_code", exit_code},
               {"checks", outcome.checks},
               {"results", outcome.results}};
  RunResult result{exit_code, outcome.status, report.dump(2) + "\n",
                   std::move(outcome.csvs)};

  if (opts.write_files) {
    std::filesystem::create_directories(opts.out_dir);
    const auto write = [&](const std::string& fname, const std::string& content) {
      std::ofstream f(opts.out_dir / fname, std::ios::binary);
      if (!f) fail("cannot write output file " + (opts.out_dir / fname).string());
      f << content;
    };
    write("report.json", result.report_json);
    for (const auto& [fname, content] : result.side_files) write(fname, content);
    const ojson meta{{"timestamp", iso_timestamp()},
                     {"workers", opts.workers},
                     {"tool", "cocyc 0.1.0"}};
    write("run_meta.json", meta.dump(2) + "\n");
  }
  return result;
}

}  // namespace cocyc
