#pragma once

#include <string>
#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

enum class RiskClass { kLow, kModerate, kHigh };
enum class CellKind { kFree, kObstacle, kInitial, kTarget };

/// Rectangular grid world. Cell (x,y) has x growing rightwards and y growing
/// upwards; the layout text file lists rows top (highest y) to bottom:
///
///   grid 1
///   slip 0.9
///   discount 0.9
///   T m m . .
///   h . . # .
///   S . . . .
///
/// Legend: S initial (low risk), T target, # obstacle, h high, m moderate,
/// . low. Cost by risk class: low 1, moderate 2, high 4; targets cost 0.
struct GridSpec {
  int width = 0;
  int height = 0;
  double slip = 0.9;       // probability a move succeeds; rest stays put
  double discount = 0.9;
  std::vector<std::vector<CellKind>> kind;  // [x][y]
  std::vector<std::vector<RiskClass>> risk;

  bool in_bounds(int x, int y) const;
  bool walkable(int x, int y) const;
};

GridSpec parse_grid_layout(const std::string& text);
GridSpec load_grid_file(const std::string& path);

std::string grid_state_name(int x, int y);
double risk_cost(RiskClass risk);

/// MDP over the walkable cells. Actions up/down/left/right/stay; a move
/// succeeds with probability `slip` and stays put otherwise; moves into
/// obstacles or off-grid keep the full mass in place; stay is deterministic.
/// Targets are absorbing with a single zero-cost stay action; every other
/// cell charges its risk cost on all actions.
Mdp generate_grid(const GridSpec& spec);

/// Risk class of an Mdp state produced by generate_grid, looked up by name.
RiskClass risk_of_state(const GridSpec& spec, const std::string& state_name);

/// Cell table (name,x,y,kind,risk,cost) as CSV.
std::string grid_to_csv(const GridSpec& spec);

}  // namespace mdpsynth
