#pragma once

#include <filesystem>
#include <string>

#include "ancvi/mdp.hpp"

namespace ancvi {

// MDP JSON schema:
//   {"n_states": int, "n_actions": int, "gamma": float,
//    "transitions": [[[float]]], "rewards": [[float]]}
// with transitions[s][a][s'] and rewards[s][a].

std::string mdp_to_json(const Mdp& mdp);

/// Parses and validates. Shape problems raise ParseError, content problems
/// raise ValidationFailed with the full report.
Mdp mdp_from_json(const std::string& text);

Mdp load_mdp(const std::filesystem::path& path);
void save_mdp(const Mdp& mdp, const std::filesystem::path& path);

/// Plain JSON array of numbers; kind is supplied by the caller.
ValueFn value_fn_from_json(const std::string& text, ValueKind kind);
ValueFn load_value_fn(const std::filesystem::path& path, ValueKind kind);
std::string value_fn_to_json(const ValueFn& u);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ancvi
