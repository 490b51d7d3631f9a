#include "ancvi/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ancvi {

using nlohmann::json;

std::string mdp_to_json(const Mdp& mdp) {
  const std::size_t n = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  json transitions = json::array();
  json rewards = json::array();
  for (std::size_t s = 0; s < n; ++s) {
    json per_action = json::array();
    json r_row = json::array();
    for (std::size_t a = 0; a < na; ++a) {
      const auto row = mdp.row(s, a);
      per_action.push_back(std::vector<double>(row.begin(), row.end()));
      r_row.push_back(mdp.reward(s, a));
    }
    transitions.push_back(std::move(per_action));
    rewards.push_back(std::move(r_row));
  }
  json doc;
  doc["n_states"] = n;
  doc["n_actions"] = na;
  doc["gamma"] = mdp.gamma();
  doc["transitions"] = std::move(transitions);
  doc["rewards"] = std::move(rewards);
  return doc.dump();
}

Mdp mdp_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  std::size_t n = 0;
  std::size_t na = 0;
  double gamma = 0.0;
  std::vector<double> p;
  std::vector<double> r;
  try {
    n = doc.at("n_states").get<std::size_t>();
    na = doc.at("n_actions").get<std::size_t>();
    gamma = doc.at("gamma").get<double>();
    const auto& t = doc.at("transitions");
    const auto& rw = doc.at("rewards");
    if (t.size() != n || rw.size() != n) throw Error(ErrorCode::ParseError, "outer dimension must equal n_states");
    p.reserve(n * na * n);
    r.reserve(n * na);
    for (std::size_t s = 0; s < n; ++s) {
      if (t[s].size() != na || rw[s].size() != na) {
        throw Error(ErrorCode::ParseError, "state " + std::to_string(s) + " must list n_actions entries");
      }
      for (std::size_t a = 0; a < na; ++a) {
        const auto& row = t[s][a];
        if (row.size() != n) {
          throw Error(ErrorCode::ParseError, "transitions[" + std::to_string(s) + "][" + std::to_string(a) + "] must have n_states entries");
        }
        for (const auto& x : row) p.push_back(x.get<double>());
        r.push_back(rw[s][a].get<double>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  Mdp mdp(n, na, gamma, std::move(p), std::move(r));
  require_valid(mdp);
  return mdp;
}

Mdp load_mdp(const std::filesystem::path& path) { return mdp_from_json(read_file(path)); }

void save_mdp(const Mdp& mdp, const std::filesystem::path& path) { write_file(path, mdp_to_json(mdp) + "\n"); }

ValueFn value_fn_from_json(const std::string& text, ValueKind kind) {
  try {
    return {kind, json::parse(text).get<std::vector<double>>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ValueFn load_value_fn(const std::filesystem::path& path, ValueKind kind) {
  return value_fn_from_json(read_file(path), kind);
}

std::string value_fn_to_json(const ValueFn& u) { return json(u.values).dump(); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace ancvi
