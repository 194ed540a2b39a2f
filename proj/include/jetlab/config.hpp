#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "jetlab/gridmap.hpp"
#include "jetlab/lsqsolve.hpp"
#include "jetlab/scenarios.hpp"
#include "jetlab/system.hpp"

namespace jetlab {

// A parsed run configuration. For higher-order configurations the stored
// system is the prolonged first-order one and n is the extended fibre
// dimension; the original ingredients are kept for the reduce command.
struct RunConfig {
  enum class Kind { Explicit, Orbits, Pfaff, Group, YangMills, HigherOrder };

  std::string name;
  Kind kind = Kind::Explicit;
  int p = 0, n = 0;

  std::optional<SystemSpec> sys;

  std::vector<double> tmin, tmax;
  std::vector<int> grid;
  GridMap::Boundary boundary = GridMap::Boundary::FixedInitial;
  std::vector<Expr> boundary_values;  // n expressions over t

  SolveOptions solver;
  int verify_samples = 100;
  std::uint64_t verify_seed = 7;
  double verify_tol = 1e-9;
  double einstein_K = 1.0;
  std::vector<double> xmin, xmax;  // sampling box on the target fibre

  // scenario ingredients retained for closed-form cross-checks
  std::vector<Expr> orbit_xi;
  std::optional<GroupIngredients> group;
  std::optional<YangMillsIngredients> ym;
  std::optional<HigherOrderSpec> higher;
  std::optional<ProlongResult> reduction;

  nlohmann::json raw;  // original document, for the reduce command
};

RunConfig load_config(const std::string& path);

// Grid seeded with the boundary expressions evaluated at every node.
GridMap initial_grid(const RunConfig& cfg);

}  // namespace jetlab
