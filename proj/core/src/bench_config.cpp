#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "amis/bench.hpp"
#include "amis/errors.hpp"

namespace amis::bench {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"target", {"kind", "mean", "cov", "weights", "means", "covs", "b", "sigma1_sq", "log_constant"}},
      {"family", {"truncation_lower", "truncation_upper", "diagonal"}},
      {"theta1", {"mean", "cov"}},
      {"schedule", {"preset", "kind", "N", "T", "sizes"}},
      {"seeds", {"list", "base", "replicates"}},
      {"run", {"algorithms", "normalization", "output"}},
      {"psi", {}},
      {"grid", {"cells", "half_width_sd", "lower", "upper"}},
  };
  return keys;
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::vector<std::string>& problems() { return problems_; }

  void fail(const std::string& path, const std::string& msg) { problems_.push_back(path + ": " + msg); }

  std::optional<std::string> text(const std::string& path) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  bool has(const std::string& path) const { return text(path).has_value(); }

  std::optional<double> number(const std::string& path) {
    auto t = text(path);
    if (!t) return std::nullopt;
    auto v = to_double(*t);
    if (!v) fail(path, "expected a number, got '" + *t + "'");
    return v;
  }

  std::optional<long long> integer(const std::string& path) {
    auto t = text(path);
    if (!t) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc() || ptr != t->data() + t->size()) {
      fail(path, "expected an integer, got '" + *t + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& path) {
    auto t = text(path);
    if (!t) return std::nullopt;
    if (*t == "true" || *t == "1" || *t == "yes") return true;
    if (*t == "false" || *t == "0" || *t == "no") return false;
    fail(path, "expected true or false, got '" + *t + "'");
    return std::nullopt;
  }

  std::optional<Vector> vector(const std::string& path, std::optional<int> expected_size = {}) {
    auto t = text(path);
    if (!t) return std::nullopt;
    return parse_vector(path, *t, expected_size);
  }

  std::optional<Vector> parse_vector(const std::string& path, const std::string& t,
                                     std::optional<int> expected_size) {
    const auto parts = split(t, " ,\t");
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto x = to_double(parts[i]);
      if (!x) {
        fail(path, "expected numbers, got '" + parts[i] + "'");
        return std::nullopt;
      }
      v[static_cast<Eigen::Index>(i)] = *x;
    }
    if (parts.empty()) {
      fail(path, "empty list");
      return std::nullopt;
    }
    if (expected_size && v.size() != *expected_size) {
      fail(path, "expected " + std::to_string(*expected_size) + " values, got " +
                     std::to_string(v.size()));
      return std::nullopt;
    }
    return v;
  }

  // Row-major d x d matrix given as d*d numbers.
  std::optional<Matrix> square(const std::string& path, const std::string& t, int d) {
    auto v = parse_vector(path, t, d * d);
    if (!v) return std::nullopt;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = (*v)[i * d + j];
    return m;
  }

  std::optional<Matrix> square(const std::string& path, int d) {
    auto t = text(path);
    if (!t) return std::nullopt;
    return square(path, *t, d);
  }

  void require(const std::string& path) {
    if (!has(path)) fail(path, "required key is missing");
  }

  static std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string> problems_;
};

void check_pd(Reader& r, const std::string& path, const Matrix& m) {
  try {
    (void)ProposalParams::from_mean_cov(Vector::Zero(m.rows()), m);
  } catch (const ContractViolation&) {
    r.fail(path, "matrix must be symmetric positive definite");
  }
}

void check_unknown_keys(const pt::ptree& tree, Reader& r) {
  const auto& allowed = allowed_keys();
  for (const auto& [section, body] : tree) {
    auto it = allowed.find(section);
    if (it == allowed.end()) {
      r.fail(section, body.empty() ? "unknown top-level key" : "unknown section");
      continue;
    }
    if (section == "psi") continue;
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) r.fail(section + "." + key, "unknown key");
    }
  }
}

void parse_target(Reader& r, BenchConfig& c, int& dim) {
  r.require("target.kind");
  const auto kind = r.text("target.kind").value_or("");
  c.target.kind = kind;
  c.target.log_constant = r.number("target.log_constant");
  if (kind == "gaussian") {
    r.require("target.mean");
    r.require("target.cov");
    if (auto m = r.vector("target.mean")) {
      dim = static_cast<int>(m->size());
      c.target.mean = *m;
      if (auto cov = r.square("target.cov", dim)) {
        check_pd(r, "target.cov", *cov);
        c.target.cov = *cov;
      }
    }
  } else if (kind == "mixture") {
    r.require("target.weights");
    r.require("target.means");
    r.require("target.covs");
    auto w = r.vector("target.weights");
    if (w) {
      c.target.weights.assign(w->data(), w->data() + w->size());
      double total = 0.0;
      for (double x : c.target.weights) {
        if (!(x > 0.0)) r.fail("target.weights", "weights must be positive");
        total += x;
      }
      if (std::abs(total - 1.0) > 1e-12) r.fail("target.weights", "weights must sum to 1");
    }
    const auto means = split(r.text("target.means").value_or(""), ";");
    const auto covs = split(r.text("target.covs").value_or(""), ";");
    if (w && (means.size() != c.target.weights.size() || covs.size() != c.target.weights.size()))
      r.fail("target.means", "need one mean and one cov per weight (separate components with ';')");
    for (const auto& m : means) {
      auto v = r.parse_vector("target.means", m, dim > 0 ? std::optional<int>(dim) : std::nullopt);
      if (!v) continue;
      dim = static_cast<int>(v->size());
      c.target.means.push_back(*v);
    }
    for (const auto& m : covs) {
      if (dim <= 0) break;
      auto cov = r.square("target.covs", m, dim);
      if (!cov) continue;
      check_pd(r, "target.covs", *cov);
      c.target.covs.push_back(*cov);
    }
  } else if (kind == "banana") {
    dim = 2;
    c.target.b = r.number("target.b").value_or(0.0);
    c.target.sigma1_sq = r.number("target.sigma1_sq").value_or(1.0);
    if (!(c.target.sigma1_sq > 0.0)) r.fail("target.sigma1_sq", "must be positive");
  } else if (!kind.empty()) {
    r.fail("target.kind", "unknown target '" + kind + "' (gaussian, mixture, banana)");
  }
}

void parse_schedule(Reader& r, BenchConfig& c) {
  auto& s = c.schedule;
  if (auto preset = r.text("schedule.preset")) {
    if (*preset == "paper-schedule") {
      s.preset = *preset;
      s.kind = ScheduleKind::Linear;
      s.n = 100;
      s.iterations = 45;
    } else {
      r.fail("schedule.preset", "unknown preset '" + *preset + "' (paper-schedule)");
    }
  }
  if (auto kind = r.text("schedule.kind")) {
    if (*kind == "linear") s.kind = ScheduleKind::Linear;
    else if (*kind == "quadratic") s.kind = ScheduleKind::Quadratic;
    else if (*kind == "explicit") s.kind = ScheduleKind::Explicit;
    else r.fail("schedule.kind", "unknown schedule '" + *kind + "' (linear, quadratic, explicit)");
  } else if (s.preset.empty()) {
    r.fail("schedule.kind", "required key is missing");
  }
  if (s.kind == ScheduleKind::Explicit) {
    auto t = r.text("schedule.sizes");
    if (!t) {
      r.fail("schedule.sizes", "required for explicit schedules");
      return;
    }
    for (const auto& part : split(*t, " ,\t")) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || ptr != part.data() + part.size() || v <= 0) {
        r.fail("schedule.sizes", "expected positive integers, got '" + part + "'");
        return;
      }
      s.sizes.push_back(static_cast<std::size_t>(v));
    }
    if (!std::is_sorted(s.sizes.begin(), s.sizes.end()))
      r.fail("schedule.sizes", "sizes must be non-decreasing");
    s.iterations = static_cast<int>(s.sizes.size());
    return;
  }
  if (auto n = r.integer("schedule.N")) {
    if (*n <= 0) r.fail("schedule.N", "must be a positive integer");
    else s.n = static_cast<std::size_t>(*n);
  } else if (s.preset.empty()) {
    r.fail("schedule.N", "required key is missing");
  }
  if (auto t = r.integer("schedule.T")) {
    if (*t < 1) r.fail("schedule.T", "must be at least 1");
    else s.iterations = static_cast<int>(*t);
  } else if (s.preset.empty()) {
    r.fail("schedule.T", "required key is missing");
  }
}

void parse_seeds(Reader& r, BenchConfig& c) {
  if (auto list = r.text("seeds.list")) {
    for (const auto& part : split(*list, " ,\t")) {
      unsigned long long v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || ptr != part.data() + part.size()) {
        r.fail("seeds.list", "expected unsigned integers, got '" + part + "'");
        return;
      }
      c.seeds.push_back(v);
    }
    if (r.has("seeds.base") || r.has("seeds.replicates"))
      r.fail("seeds.list", "give either a list or base/replicates, not both");
    return;
  }
  long long base = r.integer("seeds.base").value_or(1);
  long long n = r.integer("seeds.replicates").value_or(1);
  if (base < 0) r.fail("seeds.base", "must be non-negative");
  if (n < 1) {
    r.fail("seeds.replicates", "must be at least 1");
    return;
  }
  for (long long i = 0; i < n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(base + i));
}

void parse_psi(const pt::ptree& tree, Reader& r, BenchConfig& c, int dim) {
  auto sec = tree.get_child_optional("psi");
  if (!sec) return;
  for (const auto& [name, node] : *sec) {
    const std::string path = "psi." + name;
    const auto parts = split(node.get_value<std::string>(), " \t");
    IntegrandSpec spec;
    spec.name = name;
    if (parts.empty()) {
      r.fail(path, "empty integrand");
      continue;
    }
    spec.kind = parts[0];
    if (spec.kind == "monomial") {
      if (static_cast<int>(parts.size()) != dim + 1) {
        r.fail(path, "monomial needs one power per dimension");
        continue;
      }
      bool ok = true;
      for (std::size_t i = 1; i < parts.size(); ++i) {
        int p = 0;
        auto [ptr, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), p);
        if (ec != std::errc() || ptr != parts[i].data() + parts[i].size() || p < 0) ok = false;
        spec.powers.push_back(p);
      }
      if (!ok) r.fail(path, "monomial powers must be non-negative integers");
    } else if (spec.kind == "indicator") {
      // indicator <axis> <'>'|'<'> <threshold>
      if (parts.size() != 4 || (parts[2] != ">" && parts[2] != "<")) {
        r.fail(path, "expected 'indicator <axis> > <threshold>'");
        continue;
      }
      auto th = Reader::to_double(parts[3]);
      int axis = -1;
      std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), axis);
      if (!th || axis < 0 || axis >= std::max(dim, 1)) {
        r.fail(path, "bad indicator axis or threshold");
        continue;
      }
      spec.axis = axis;
      spec.greater = parts[2] == ">";
      spec.threshold = *th;
    } else if (spec.kind == "constant") {
      auto v = parts.size() == 2 ? Reader::to_double(parts[1]) : std::nullopt;
      if (!v) {
        r.fail(path, "expected 'constant <value>'");
        continue;
      }
      spec.value = *v;
    } else {
      r.fail(path, "unknown integrand kind '" + spec.kind + "' (monomial, indicator, constant)");
      continue;
    }
    c.psi.push_back(std::move(spec));
  }
}

BenchConfig parse_tree(const pt::ptree& tree) {
  Reader r(tree);
  BenchConfig c;
  check_unknown_keys(tree, r);

  int dim = 0;
  parse_target(r, c, dim);

  r.require("theta1.mean");
  r.require("theta1.cov");
  if (dim > 0) {
    if (auto m = r.vector("theta1.mean", dim)) c.theta1_mean = *m;
    if (auto cov = r.square("theta1.cov", dim)) {
      check_pd(r, "theta1.cov", *cov);
      c.theta1_cov = *cov;
    }
  }

  c.family.dim = std::max(dim, 1);
  c.family.diagonal = r.boolean("family.diagonal").value_or(false);
  const bool has_lo = r.has("family.truncation_lower");
  const bool has_hi = r.has("family.truncation_upper");
  if (has_lo != has_hi) {
    r.fail(has_lo ? "family.truncation_upper" : "family.truncation_lower",
           "truncation needs both bounds");
  } else if (has_lo && dim > 0) {
    auto lo = r.vector("family.truncation_lower", dim);
    auto hi = r.vector("family.truncation_upper", dim);
    if (lo && hi) {
      if (!(lo->array() < hi->array()).all())
        r.fail("family.truncation_lower", "must be below truncation_upper componentwise");
      else
        c.family.truncation = Box{*lo, *hi};
    }
  }

  parse_schedule(r, c);
  parse_seeds(r, c);

  if (auto algs = r.text("run.algorithms")) {
    c.algorithms.clear();
    for (const auto& part : split(*algs, " ,\t")) {
      auto a = part.size() == 1 ? algorithm_from_letter(part[0]) : std::nullopt;
      if (!a) {
        r.fail("run.algorithms", "unknown algorithm '" + part + "' (a, b, c)");
        continue;
      }
      if (std::find(c.algorithms.begin(), c.algorithms.end(), *a) == c.algorithms.end())
        c.algorithms.push_back(*a);
    }
    if (c.algorithms.empty()) r.fail("run.algorithms", "no algorithms selected");
    std::sort(c.algorithms.begin(), c.algorithms.end(),
              [](Algorithm x, Algorithm y) { return algorithm_letter(x) < algorithm_letter(y); });
  }
  if (auto norm = r.text("run.normalization")) {
    if (*norm == "normalized") c.normalization = Normalization::Normalized;
    else if (*norm == "self-normalized") c.normalization = Normalization::SelfNormalized;
    else r.fail("run.normalization", "expected normalized or self-normalized");
  }
  if (auto out = r.text("run.output")) c.output = *out;

  parse_psi(tree, r, c, dim);

  if (auto cells = r.integer("grid.cells")) {
    if (*cells < 1) r.fail("grid.cells", "must be positive");
    else c.grid_cells = static_cast<int>(*cells);
  }
  if (auto hw = r.number("grid.half_width_sd")) {
    if (!(*hw > 0.0)) r.fail("grid.half_width_sd", "must be positive");
    else c.grid_half_width_sd = *hw;
  }
  if (dim > 2) r.fail("target", "distribution-function diagnostics need d <= 2");
  if (r.has("grid.lower") != r.has("grid.upper")) {
    r.fail("grid.lower", "grid bounds need both lower and upper");
  } else if (r.has("grid.lower") && dim > 0) {
    c.grid_lower = r.vector("grid.lower", dim);
    c.grid_upper = r.vector("grid.upper", dim);
    if (c.grid_lower && c.grid_upper && !(c.grid_lower->array() < c.grid_upper->array()).all())
      r.fail("grid.lower", "must be below grid.upper componentwise");
  }

  if (!r.problems().empty()) throw ConfigError(r.problems());
  return c;
}

}  // namespace

BenchConfig parse_config_string(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }
  return parse_tree(tree);
}

BenchConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open file"});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

}  // namespace amis::bench
