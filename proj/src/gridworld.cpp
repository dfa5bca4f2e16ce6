#include "mdpsynth/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "mdpsynth/mdp_io.hpp"

namespace mdpsynth {

namespace {

const char* kind_label(CellKind kind) {
  switch (kind) {
    case CellKind::kFree: return "free";
    case CellKind::kObstacle: return "obstacle";
    case CellKind::kInitial: return "initial";
    case CellKind::kTarget: return "target";
  }
  return "?";
}

const char* risk_label(RiskClass risk) {
  switch (risk) {
    case RiskClass::kLow: return "low";
    case RiskClass::kModerate: return "moderate";
    case RiskClass::kHigh: return "high";
  }
  return "?";
}

}  // namespace

bool GridSpec::in_bounds(int x, int y) const {
  return x >= 0 && x < width && y >= 0 && y < height;
}

bool GridSpec::walkable(int x, int y) const {
  return in_bounds(x, y) && kind[x][y] != CellKind::kObstacle;
}

GridSpec parse_grid_layout(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false, saw_slip = false, saw_discount = false;
  GridSpec spec;
  std::vector<std::vector<std::string>> rows;  // top to bottom

  const auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "line " << line_no << ": " << what;
    throw std::runtime_error(msg.str());
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (words >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (!saw_header) {
      if (tokens.size() != 2 || tokens[0] != "grid" || tokens[1] != "1")
        fail("expected 'grid 1' header");
      saw_header = true;
    } else if (tokens[0] == "slip" && !saw_slip && rows.empty()) {
      if (tokens.size() != 2) fail("expected 'slip <value>'");
      double v = 0.0;
      const auto [p, ec] =
          std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), v);
      if (ec != std::errc() || p != tokens[1].data() + tokens[1].size())
        fail("bad slip value");
      spec.slip = v;
      saw_slip = true;
    } else if (tokens[0] == "discount" && !saw_discount && rows.empty()) {
      if (tokens.size() != 2) fail("expected 'discount <value>'");
      double v = 0.0;
      const auto [p, ec] =
          std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), v);
      if (ec != std::errc() || p != tokens[1].data() + tokens[1].size())
        fail("bad discount value");
      spec.discount = v;
      saw_discount = true;
    } else {
      for (const std::string& t : tokens)
        if (t.size() != 1 || std::string("ST#hm.").find(t[0]) == std::string::npos)
          fail("unknown cell glyph '" + t + "'");
      if (!rows.empty() && tokens.size() != rows.front().size())
        fail("row width differs from the first row");
      rows.push_back(tokens);
    }
  }
  if (!saw_header) throw std::runtime_error("empty layout: missing 'grid 1'");
  if (rows.empty()) throw std::runtime_error("layout has no rows");
  if (spec.slip <= 0.0 || spec.slip > 1.0)
    throw std::runtime_error("slip must be in (0,1]");

  spec.height = static_cast<int>(rows.size());
  spec.width = static_cast<int>(rows.front().size());
  spec.kind.assign(spec.width,
                   std::vector<CellKind>(spec.height, CellKind::kFree));
  spec.risk.assign(spec.width,
                   std::vector<RiskClass>(spec.height, RiskClass::kLow));
  int initials = 0, targets = 0;
  for (int r = 0; r < spec.height; ++r) {
    const int y = spec.height - 1 - r;  // first row is the top
    for (int x = 0; x < spec.width; ++x) {
      switch (rows[r][x][0]) {
        case 'S':
          spec.kind[x][y] = CellKind::kInitial;
          ++initials;
          break;
        case 'T':
          spec.kind[x][y] = CellKind::kTarget;
          ++targets;
          break;
        case '#': spec.kind[x][y] = CellKind::kObstacle; break;
        case 'h': spec.risk[x][y] = RiskClass::kHigh; break;
        case 'm': spec.risk[x][y] = RiskClass::kModerate; break;
        case '.': break;
      }
    }
  }
  if (initials != 1)
    throw std::runtime_error("layout needs exactly one 'S' cell");
  if (targets == 0) throw std::runtime_error("layout needs a 'T' cell");
  return spec;
}

GridSpec load_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_grid_layout(buf.str());
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

std::string grid_state_name(int x, int y) {
  std::ostringstream out;
  out << "c" << x << "_" << y;
  return out.str();
}

double risk_cost(RiskClass risk) {
  switch (risk) {
    case RiskClass::kLow: return 1.0;
    case RiskClass::kModerate: return 2.0;
    case RiskClass::kHigh: return 4.0;
  }
  return 1.0;
}

Mdp generate_grid(const GridSpec& spec) {
  Mdp mdp;
  mdp.discount = spec.discount;
  std::vector<std::vector<int>> id(spec.width,
                                   std::vector<int>(spec.height, -1));
  for (int y = spec.height - 1; y >= 0; --y)
    for (int x = 0; x < spec.width; ++x) {
      if (!spec.walkable(x, y)) continue;
      id[x][y] = static_cast<int>(mdp.state_names.size());
      mdp.state_names.push_back(grid_state_name(x, y));
      if (spec.kind[x][y] == CellKind::kInitial)
        mdp.initial = id[x][y];
      else if (spec.kind[x][y] == CellKind::kTarget)
        mdp.targets.push_back(id[x][y]);
    }
  std::sort(mdp.targets.begin(), mdp.targets.end());

  static constexpr struct {
    const char* name;
    int dx, dy;
  } kMoves[] = {{"up", 0, 1}, {"down", 0, -1}, {"left", -1, 0}, {"right", 1, 0}};

  mdp.actions.resize(mdp.state_names.size());
  for (int y = spec.height - 1; y >= 0; --y)
    for (int x = 0; x < spec.width; ++x) {
      if (!spec.walkable(x, y)) continue;
      const int s = id[x][y];
      if (spec.kind[x][y] == CellKind::kTarget) {
        ActionSpec stay;
        stay.name = "stay";
        stay.cost = 0.0;
        stay.transitions.emplace_back(s, 1.0);
        mdp.actions[s].push_back(std::move(stay));
        continue;
      }
      const double cost = risk_cost(spec.risk[x][y]);
      for (const auto& move : kMoves) {
        ActionSpec act;
        act.name = move.name;
        act.cost = cost;
        const int nx = x + move.dx, ny = y + move.dy;
        if (spec.walkable(nx, ny)) {
          act.transitions.emplace_back(id[nx][ny], spec.slip);
          if (spec.slip < 1.0)
            act.transitions.emplace_back(s, 1.0 - spec.slip);
        } else {
          act.transitions.emplace_back(s, 1.0);
        }
        mdp.actions[s].push_back(std::move(act));
      }
      ActionSpec stay;
      stay.name = "stay";
      stay.cost = cost;
      stay.transitions.emplace_back(s, 1.0);
      mdp.actions[s].push_back(std::move(stay));
    }
  require_valid(mdp);
  return mdp;
}

RiskClass risk_of_state(const GridSpec& spec, const std::string& state_name) {
  for (int x = 0; x < spec.width; ++x)
    for (int y = 0; y < spec.height; ++y)
      if (spec.walkable(x, y) && grid_state_name(x, y) == state_name)
        return spec.risk[x][y];
  throw std::runtime_error("no grid cell named " + state_name);
}

std::string grid_to_csv(const GridSpec& spec) {
  std::ostringstream out;
  out << "name,x,y,kind,risk,cost\n";
  for (int y = spec.height - 1; y >= 0; --y)
    for (int x = 0; x < spec.width; ++x) {
      const bool walk = spec.walkable(x, y);
      const double cost = spec.kind[x][y] == CellKind::kTarget
                              ? 0.0
                              : risk_cost(spec.risk[x][y]);
      out << (walk ? grid_state_name(x, y) : "") << "," << x << "," << y << ","
          << kind_label(spec.kind[x][y]) << "," << risk_label(spec.risk[x][y])
          << "," << (walk ? format_double(cost) : "") << "\n";
    }
  return out.str();
}

}  // namespace mdpsynth
