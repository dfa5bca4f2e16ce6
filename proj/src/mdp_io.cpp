#include "mdpsynth/mdp_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mdpsynth {

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream in(line);
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

[[noreturn]] void fail_at(int line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line_no << ": " << what;
  throw std::runtime_error(msg.str());
}

double parse_number(const std::string& token, int line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    fail_at(line_no, "expected a number, got '" + token + "'");
  return value;
}

int parse_int(const std::string& token, int line_no) {
  int value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    fail_at(line_no, "expected an integer, got '" + token + "'");
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

MdpDocument parse_mdp_document(const std::string& text) {
  MdpDocument doc;
  doc.discount = 0.0;
  bool saw_header = false, saw_discount = false, saw_initial = false,
       saw_targets = false;
  MdpDocument::State* state = nullptr;
  MdpDocument::Action* action = nullptr;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> words = split_words(line);
    if (words.empty()) continue;
    const std::string& key = words[0];
    if (!saw_header) {
      if (key != "mdp" || words.size() != 2)
        fail_at(line_no, "expected 'mdp 1' header");
      doc.version = parse_int(words[1], line_no);
      if (doc.version != 1)
        fail_at(line_no, "unsupported version " + words[1]);
      saw_header = true;
    } else if (key == "discount") {
      if (words.size() != 2) fail_at(line_no, "expected 'discount <value>'");
      doc.discount = parse_number(words[1], line_no);
      saw_discount = true;
    } else if (key == "initial") {
      if (words.size() != 2) fail_at(line_no, "expected 'initial <state>'");
      doc.initial = words[1];
      saw_initial = true;
    } else if (key == "targets") {
      if (words.size() < 2)
        fail_at(line_no, "expected 'targets <state>...'");
      doc.targets.assign(words.begin() + 1, words.end());
      saw_targets = true;
    } else if (key == "state") {
      if (words.size() != 2) fail_at(line_no, "expected 'state <name>'");
      doc.states.push_back({words[1], {}});
      state = &doc.states.back();
      action = nullptr;
    } else if (key == "action") {
      if (!state) fail_at(line_no, "'action' before any 'state'");
      if (words.size() != 2 && !(words.size() == 4 && words[2] == "cost"))
        fail_at(line_no, "expected 'action <name> [cost <value>]'");
      MdpDocument::Action act;
      act.name = words[1];
      if (words.size() == 4) act.cost = parse_number(words[3], line_no);
      state->actions.push_back(std::move(act));
      action = &state->actions.back();
    } else if (key == "->") {
      if (!action) fail_at(line_no, "'->' before any 'action'");
      if (words.size() != 3)
        fail_at(line_no, "expected '-> <state> <probability>'");
      action->transitions.push_back(
          {words[1], parse_number(words[2], line_no)});
    } else {
      fail_at(line_no, "unknown keyword '" + key + "'");
    }
  }
  if (!saw_header) throw std::runtime_error("empty document: missing 'mdp 1'");
  if (!saw_discount) throw std::runtime_error("missing 'discount' line");
  if (!saw_initial) throw std::runtime_error("missing 'initial' line");
  if (!saw_targets) throw std::runtime_error("missing 'targets' line");
  return doc;
}

std::string serialize_mdp_document(const MdpDocument& doc) {
  std::ostringstream out;
  out << "mdp " << doc.version << "\n";
  out << "discount " << format_double(doc.discount) << "\n";
  out << "initial " << doc.initial << "\n";
  out << "targets";
  for (const std::string& t : doc.targets) out << " " << t;
  out << "\n";
  for (const auto& state : doc.states) {
    out << "state " << state.name << "\n";
    for (const auto& action : state.actions) {
      out << "  action " << action.name;
      if (action.cost != 0.0) out << " cost " << format_double(action.cost);
      out << "\n";
      for (const auto& tr : action.transitions)
        out << "    -> " << tr.target << " " << format_double(tr.prob) << "\n";
    }
  }
  return out.str();
}

Mdp mdp_from_document(const MdpDocument& doc) {
  Mdp mdp;
  mdp.discount = doc.discount;
  std::map<std::string, int> ids;
  for (const auto& state : doc.states) {
    if (!ids.emplace(state.name, static_cast<int>(mdp.state_names.size()))
             .second)
      throw std::runtime_error("duplicate state name " + state.name);
    mdp.state_names.push_back(state.name);
  }
  const auto lookup = [&](const std::string& name, const char* role) {
    const auto it = ids.find(name);
    if (it == ids.end())
      throw std::runtime_error(std::string(role) + " references unknown state " +
                               name);
    return it->second;
  };
  mdp.initial = lookup(doc.initial, "initial");
  for (const std::string& t : doc.targets)
    mdp.targets.push_back(lookup(t, "targets"));
  std::sort(mdp.targets.begin(), mdp.targets.end());
  mdp.targets.erase(std::unique(mdp.targets.begin(), mdp.targets.end()),
                    mdp.targets.end());
  mdp.actions.resize(doc.states.size());
  for (std::size_t s = 0; s < doc.states.size(); ++s)
    for (const auto& action : doc.states[s].actions) {
      ActionSpec spec;
      spec.name = action.name;
      spec.cost = action.cost;
      for (const auto& tr : action.transitions)
        spec.transitions.emplace_back(lookup(tr.target, "transition"),
                                      tr.prob);
      mdp.actions[s].push_back(std::move(spec));
    }
  require_valid(mdp);
  return mdp;
}

MdpDocument document_from_mdp(const Mdp& mdp) {
  MdpDocument doc;
  doc.discount = mdp.discount;
  doc.initial = mdp.state_names[mdp.initial];
  for (int t : mdp.targets) doc.targets.push_back(mdp.state_names[t]);
  for (int s = 0; s < mdp.num_states(); ++s) {
    MdpDocument::State state;
    state.name = mdp.state_names[s];
    for (const auto& act : mdp.actions[s]) {
      MdpDocument::Action action;
      action.name = act.name;
      action.cost = act.cost;
      for (const auto& [next, p] : act.transitions)
        action.transitions.push_back({mdp.state_names[next], p});
      state.actions.push_back(std::move(action));
    }
    doc.states.push_back(std::move(state));
  }
  return doc;
}

Mdp load_mdp_file(const std::string& path) {
  try {
    return mdp_from_document(parse_mdp_document(read_file(path)));
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

void save_mdp_file(const std::string& path, const Mdp& mdp) {
  write_file(path, serialize_mdp_document(document_from_mdp(mdp)));
}

StationaryPolicy parse_policy(const std::string& text, const Mdp& mdp) {
  StationaryPolicy policy;
  policy.prob.resize(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s)
    policy.prob[s].assign(mdp.num_actions(s), 0.0);
  std::vector<char> seen(mdp.num_states(), 0);

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  int state = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> words = split_words(line);
    if (words.empty()) continue;
    if (!saw_header) {
      if (words.size() != 2 || words[0] != "policy" || words[1] != "1")
        fail_at(line_no, "expected 'policy 1' header");
      saw_header = true;
    } else if (words[0] == "state") {
      if (words.size() != 2) fail_at(line_no, "expected 'state <name>'");
      state = mdp.state_id(words[1]);
      if (state < 0) fail_at(line_no, "unknown state " + words[1]);
      seen[state] = 1;
    } else if (words.size() == 2) {
      if (state < 0) fail_at(line_no, "action row before any 'state'");
      const int a = mdp.action_id(state, words[0]);
      if (a < 0)
        fail_at(line_no, "state " + mdp.state_names[state] +
                             " has no action " + words[0]);
      policy.prob[state][a] = parse_number(words[1], line_no);
    } else {
      fail_at(line_no, "expected 'state <name>' or '<action> <probability>'");
    }
  }
  if (!saw_header) throw std::runtime_error("empty policy: missing 'policy 1'");
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (!seen[s])
      throw std::runtime_error("policy omits state " + mdp.state_names[s]);
    double sum = 0.0;
    for (double p : policy.prob[s]) {
      if (p < 0.0)
        throw std::runtime_error("negative probability at state " +
                                 mdp.state_names[s]);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::runtime_error("probabilities at state " + mdp.state_names[s] +
                               " sum to " + format_double(sum));
    for (double& p : policy.prob[s]) p /= sum;
  }
  require_policy_shape(mdp, policy);
  return policy;
}

std::string serialize_policy(const Mdp& mdp, const StationaryPolicy& policy) {
  require_policy_shape(mdp, policy);
  std::ostringstream out;
  out << "policy 1\n";
  for (int s = 0; s < mdp.num_states(); ++s) {
    out << "state " << mdp.state_names[s] << "\n";
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (policy.prob[s][a] != 0.0)
        out << "  " << mdp.actions[s][a].name << " "
            << format_double(policy.prob[s][a]) << "\n";
  }
  return out.str();
}

StationaryPolicy load_policy_file(const std::string& path, const Mdp& mdp) {
  try {
    return parse_policy(read_file(path), mdp);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

void save_policy_file(const std::string& path, const Mdp& mdp,
                      const StationaryPolicy& policy) {
  write_file(path, serialize_policy(mdp, policy));
}

}  // namespace mdpsynth
