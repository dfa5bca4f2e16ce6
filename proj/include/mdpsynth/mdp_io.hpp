#pragma once

#include <string>
#include <vector>

#include "mdpsynth/mdp.hpp"

namespace mdpsynth {

/// Name-based, order-preserving mirror of an Mdp, read and written in the
/// line-oriented text format documented in the README:
///
///   mdp 1
///   discount 0.5
///   initial s1
///   targets s2
///   state s1
///     action a1 cost 0
///       -> s1 1
///     action a2 cost 1
///       -> s2 1
///   state s2
///     action stay
///       -> s2 1
///
/// Omitted costs default to 0; unknown keywords are rejected with a line
/// diagnostic. Serialization round-trips doubles losslessly.
struct MdpDocument {
  struct Transition {
    std::string target;
    double prob = 0.0;
  };
  struct Action {
    std::string name;
    double cost = 0.0;
    std::vector<Transition> transitions;
  };
  struct State {
    std::string name;
    std::vector<Action> actions;
  };

  int version = 1;
  double discount = 0.9;
  std::string initial;
  std::vector<std::string> targets;
  std::vector<State> states;
};

MdpDocument parse_mdp_document(const std::string& text);
std::string serialize_mdp_document(const MdpDocument& doc);

/// Conversion validates the result and throws on any violation.
Mdp mdp_from_document(const MdpDocument& doc);
MdpDocument document_from_mdp(const Mdp& mdp);

Mdp load_mdp_file(const std::string& path);
void save_mdp_file(const std::string& path, const Mdp& mdp);

/// Policy text format:
///
///   policy 1
///   state s1
///     a1 0.875
///     a2 0.125
///
/// Omitted actions get probability 0; every state must appear and rows must
/// sum to one within 1e-6.
StationaryPolicy parse_policy(const std::string& text, const Mdp& mdp);
std::string serialize_policy(const Mdp& mdp, const StationaryPolicy& policy);
StationaryPolicy load_policy_file(const std::string& path, const Mdp& mdp);
void save_policy_file(const std::string& path, const Mdp& mdp,
                      const StationaryPolicy& policy);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace mdpsynth
