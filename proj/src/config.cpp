#include "jetlab/config.hpp"

#include <cmath>
#include <fstream>

#include "jetlab/errors.hpp"
#include "jetlab/sampling.hpp"

namespace jetlab {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::vector<std::string> default_names(const char* stem, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(stem + std::to_string(i + 1));
  return out;
}

std::vector<std::vector<std::string>> string_table(const json& j,
                                                   const std::string& key,
                                                   int rows, int cols) {
  require(j.contains(key), "missing field: " + key);
  const json& t = j.at(key);
  require(t.is_array() && static_cast<int>(t.size()) == rows,
          key + " must be a " + std::to_string(rows) + "-row table");
  std::vector<std::vector<std::string>> out(rows);
  for (int i = 0; i < rows; ++i) {
    require(t[i].is_array() && static_cast<int>(t[i].size()) == cols,
            key + " row " + std::to_string(i + 1) + " must have " +
                std::to_string(cols) + " entries");
    for (const auto& e : t[i]) out[i].push_back(e.get<std::string>());
  }
  return out;
}

std::vector<Expr> parse_list(const json& arr,
                             const std::vector<std::string>& vars,
                             const std::string& what, int count) {
  require(arr.is_array() && static_cast<int>(arr.size()) == count,
          what + " must list " + std::to_string(count) + " expressions");
  std::vector<Expr> out;
  for (const auto& e : arr) out.push_back(parse(e.get<std::string>(), vars));
  return out;
}

// Symmetry is checked numerically at seeded points so that differently
// written but equal entries still pass.
MetricField parse_metric(const json& j, const std::string& key,
                         const std::vector<std::string>& names) {
  const int d = static_cast<int>(names.size());
  auto table = string_table(j, key, d, d);
  std::vector<std::vector<Expr>> entries(d, std::vector<Expr>(d));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) entries[i][k] = parse(table[i][k], names);
  SplitMix64 rng{0x5eedu};
  for (int s = 0; s < 5; ++s) {
    std::vector<double> x(d);
    for (double& v : x) v = rng.uniform(0.25, 1.75);
    for (int i = 0; i < d; ++i)
      for (int k = i + 1; k < d; ++k)
        if (std::abs(entries[i][k].eval(x) - entries[k][i].eval(x)) > 1e-12)
          throw ConfigError(key + " is not symmetric: entries (" +
                            std::to_string(i + 1) + "," +
                            std::to_string(k + 1) + ") and (" +
                            std::to_string(k + 1) + "," +
                            std::to_string(i + 1) + ") differ");
  }
  return MetricField(names, entries);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.raw = j;
  cfg.name = j.value("name", "unnamed");
  require(j.contains("dims"), "missing field: dims");
  cfg.p = j["dims"].value("p", 0);
  cfg.n = j["dims"].value("n", 0);
  require(cfg.p >= 1 && cfg.n >= 1, "dims must be positive");

  std::vector<std::string> tnames = default_names("t", cfg.p);
  std::vector<std::string> xnames =
      j.contains("coordinates")
          ? j["coordinates"].get<std::vector<std::string>>()
          : default_names("x", cfg.n);
  require(static_cast<int>(xnames.size()) == cfg.n,
          "coordinates must list n names");
  std::vector<std::string> txnames = tnames;
  txnames.insert(txnames.end(), xnames.begin(), xnames.end());

  MetricField h = parse_metric(j, "metric_h", tnames);

  require(j.contains("X") != j.contains("scenario"),
          "exactly one of X / scenario must be present");

  if (j.contains("X")) {
    MetricField phi = parse_metric(j, "metric_phi", xnames);
    auto table = string_table(j, "X", cfg.n, cfg.p);
    std::vector<std::vector<Expr>> X(cfg.n, std::vector<Expr>(cfg.p));
    for (int i = 0; i < cfg.n; ++i)
      for (int a = 0; a < cfg.p; ++a) X[i][a] = parse(table[i][a], txnames);
    cfg.kind = RunConfig::Kind::Explicit;
    cfg.sys.emplace(h, phi, std::move(X));
  } else {
    const json& sc = j["scenario"];
    std::string type = sc.value("type", "");
    if (type == "orbits") {
      require(cfg.p == 1, "orbit systems have p = 1");
      MetricField phi = parse_metric(j, "metric_phi", xnames);
      cfg.orbit_xi = parse_list(sc.at("xi"), txnames, "scenario.xi", cfg.n);
      cfg.kind = RunConfig::Kind::Orbits;
      cfg.sys.emplace(build_orbits(cfg.orbit_xi, phi));
    } else if (type == "pfaff") {
      require(cfg.n == 1, "Pfaffian systems have n = 1");
      std::vector<Expr> A = parse_list(sc.at("A"), txnames, "scenario.A", cfg.p);
      cfg.kind = RunConfig::Kind::Pfaff;
      cfg.sys.emplace(build_pfaff(A, h));
    } else if (type == "group") {
      MetricField phi = parse_metric(j, "metric_phi", xnames);
      GroupIngredients ing;
      ing.c = sc.value("c", static_cast<int>(sc.at("xi").size()));
      require(static_cast<int>(sc.at("xi").size()) == ing.c &&
                  static_cast<int>(sc.at("A").size()) == ing.c,
              "scenario.xi and scenario.A must list c generators");
      for (int g = 0; g < ing.c; ++g) {
        ing.xi.push_back(
            parse_list(sc.at("xi")[g], txnames, "scenario.xi", cfg.n));
        ing.A.push_back(
            parse_list(sc.at("A")[g], txnames, "scenario.A", cfg.p));
      }
      cfg.kind = RunConfig::Kind::Group;
      cfg.group = ing;
      cfg.sys.emplace(build_group(ing, h, phi));
    } else if (type == "yang_mills") {
      int q = sc.value("q", 0);
      require(q >= 2, "scenario.q must be at least 2");
      const int m = skew_triangle_size(q);
      require(cfg.n == cfg.p * m,
              "dims.n must equal p*q*(q-1)/2 for Yang-Mills");
      std::vector<std::string> wnames = yang_mills_coords(q, cfg.p);
      std::vector<std::string> twnames = tnames;
      twnames.insert(twnames.end(), wnames.begin(), wnames.end());
      YangMillsIngredients ing{q, cfg.p, h, {}, {}};
      ing.f.assign(cfg.p, std::vector<std::vector<Expr>>(cfg.p));
      ing.F.assign(cfg.p, std::vector<std::vector<Expr>>(cfg.p));
      for (int a = 0; a < cfg.p; ++a)
        for (int b = a; b < cfg.p; ++b)
          ing.f[a][b] = parse_list(sc.at("f")[a][b], twnames, "scenario.f", m);
      for (int a = 0; a < cfg.p; ++a)
        for (int b = a + 1; b < cfg.p; ++b)
          ing.F[a][b] = parse_list(sc.at("F")[a][b], twnames, "scenario.F", m);
      cfg.kind = RunConfig::Kind::YangMills;
      cfg.ym = ing;
      cfg.sys.emplace(build_yang_mills(ing));
      xnames = wnames;
    } else if (type == "higher_order") {
      int r = sc.value("r", 0);
      require(r >= 1, "scenario.r must be at least 1");
      auto top = multi_indices(cfg.p, r);
      HigherOrderSpec hs{r, cfg.p, cfg.n, h, {}, {}, xnames};
      const json& rhs = sc.at("rhs");
      require(rhs.is_array() && static_cast<int>(rhs.size()) == cfg.n,
              "scenario.rhs must list n rows");
      for (int i = 0; i < cfg.n; ++i) {
        require(static_cast<int>(rhs[i].size()) == static_cast<int>(top.size()),
                "scenario.rhs rows must match the order-r multi-index count");
        hs.rhs.push_back(rhs[i].get<std::vector<std::string>>());
      }
      hs.phi = string_table(j, "metric_phi", cfg.n, cfg.n);
      cfg.kind = RunConfig::Kind::HigherOrder;
      cfg.higher = hs;
      cfg.reduction = prolong(hs);
      cfg.sys.emplace(cfg.reduction->sys);
      xnames = cfg.reduction->coords;
    } else {
      throw ConfigError("unknown scenario type: " + type);
    }
  }
  cfg.n = cfg.sys->n();

  require(j.contains("domain"), "missing field: domain");
  cfg.tmin = j["domain"].at("min").get<std::vector<double>>();
  cfg.tmax = j["domain"].at("max").get<std::vector<double>>();
  require(static_cast<int>(cfg.tmin.size()) == cfg.p &&
              static_cast<int>(cfg.tmax.size()) == cfg.p,
          "domain min/max must list p values");
  for (int d = 0; d < cfg.p; ++d)
    require(cfg.tmin[d] < cfg.tmax[d], "domain min must be below max");

  require(j.contains("grid"), "missing field: grid");
  cfg.grid = j["grid"].get<std::vector<int>>();
  require(static_cast<int>(cfg.grid.size()) == cfg.p,
          "grid must list p sizes");
  for (int s : cfg.grid) require(s >= 5, "grid sizes must be at least 5");

  if (j.contains("boundary")) {
    const json& b = j["boundary"];
    std::string type = b.value("type", "fixed_initial");
    if (type == "fixed_initial")
      cfg.boundary = GridMap::Boundary::FixedInitial;
    else if (type == "fixed_all")
      cfg.boundary = GridMap::Boundary::FixedAll;
    else
      throw ConfigError("unknown boundary type: " + type);
    int base_n = cfg.higher ? cfg.higher->n : cfg.n;
    std::vector<Expr> base =
        parse_list(b.at("values"), tnames, "boundary.values", base_n);
    if (cfg.higher) {
      // jets of the boundary map supply values for the extended coordinates
      cfg.boundary_values.clear();
      for (int l = 0; l < cfg.higher->r; ++l)
        for (int i = 0; i < base_n; ++i)
          for (const auto& mi : multi_indices(cfg.p, l)) {
            Expr e = base[i];
            for (int a : mi) e = e.diff(static_cast<std::size_t>(a));
            cfg.boundary_values.push_back(e);
          }
    } else {
      cfg.boundary_values = base;
    }
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    cfg.solver.max_iterations = s.value("max_iters", cfg.solver.max_iterations);
    cfg.solver.grad_tol = s.value("grad_tol", cfg.solver.grad_tol);
    cfg.solver.initial_step = s.value("step0", cfg.solver.initial_step);
    cfg.solver.backtrack = s.value("backtrack", cfg.solver.backtrack);
    cfg.solver.armijo_c = s.value("armijo_c", cfg.solver.armijo_c);
    cfg.solver.preconditioner =
        s.value("preconditioner", cfg.solver.preconditioner);
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    cfg.verify_samples = v.value("samples", cfg.verify_samples);
    cfg.verify_seed = v.value("seed", cfg.verify_seed);
    cfg.verify_tol = v.value("tol", cfg.verify_tol);
  }
  if (j.contains("einstein")) cfg.einstein_K = j["einstein"].value("K", 1.0);

  if (j.contains("xdomain")) {
    cfg.xmin = j["xdomain"].at("min").get<std::vector<double>>();
    cfg.xmax = j["xdomain"].at("max").get<std::vector<double>>();
  } else {
    cfg.xmin.assign(cfg.n, -1.0);
    cfg.xmax.assign(cfg.n, 1.0);
  }
  // higher-order / yang-mills configs state the sampling box for the base
  // coordinates only; extended coordinates reuse the last entry
  while (static_cast<int>(cfg.xmin.size()) < cfg.n) {
    cfg.xmin.push_back(cfg.xmin.back());
    cfg.xmax.push_back(cfg.xmax.back());
  }
  require(static_cast<int>(cfg.xmin.size()) == cfg.n &&
              static_cast<int>(cfg.xmax.size()) == cfg.n,
          "xdomain min/max must list n values");
  return cfg;
}

GridMap initial_grid(const RunConfig& cfg) {
  if (cfg.boundary_values.empty())
    throw ConfigError("boundary block with values is required");
  GridMap map;
  map.tmin = cfg.tmin;
  map.tmax = cfg.tmax;
  map.shape = cfg.grid;
  map.p = cfg.p;
  map.n = cfg.n;
  map.boundary = cfg.boundary;
  map.values.assign(map.total() * cfg.n, 0.0);
  for (long idx = 0; idx < map.total(); ++idx) {
    auto t = map.node_t(map.unflatten(idx));
    for (int i = 0; i < cfg.n; ++i)
      map.value(idx, i) = cfg.boundary_values[i].eval(t);
  }
  map.validate();
  return map;
}

}  // namespace jetlab
