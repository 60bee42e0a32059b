#pragma once
// Flat key=value configuration: one key per line, '#' comments, lists
// comma-separated. A parsed experiment config serializes back in a fixed key
// order, and every run directory receives that canonical form so any
// artifact is reproducible from its own directory.

#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashseek/csv.hpp"
#include "nashseek/sdl.hpp"

namespace nashseek {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::map<std::string, std::string> parse_key_values(
    const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    if (kv.count(key))
      throw std::runtime_error("config: duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

inline std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> items;
  for (auto& item : split(value, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

enum class AlgorithmKind { Sdl, SingleShot };
enum class GameKind { Cournot, Duopoly };

struct ExperimentConfig {
  std::string name = "experiment";
  GameKind game = GameKind::Cournot;
  std::size_t players = 20;
  std::size_t markets = 5;
  std::uint64_t instance_seed = 1;
  AlgorithmKind algorithm = AlgorithmKind::Sdl;
  ProjectionMode projection = ProjectionMode::FullSet;
  Schedules schedules;
  std::uint64_t iters = 100000;
  std::vector<std::uint64_t> seeds = {1};
  std::uint64_t record_every = 10;  // CSV row thinning stride
  double ref_tol = 1e-10;
  std::uint64_t ref_max_iter = 2000000;
  double fit_window = 0.1;
  std::size_t workers = 1;

  void validate() const {
    if (name.empty()) throw std::runtime_error("config: empty name");
    for (char ch : name)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
            ch == '-' || ch == '.'))
        throw std::runtime_error("config: name must be filename-safe");
    if (game == GameKind::Cournot && (players < 2 || markets < 1))
      throw std::runtime_error("config: cournot needs players>=2, markets>=1");
    if (iters < 1) throw std::runtime_error("config: iters < 1");
    if (seeds.empty()) throw std::runtime_error("config: no seeds");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size())
      throw std::runtime_error("config: duplicate seeds");
    if (record_every < 1) throw std::runtime_error("config: record_every < 1");
    if (!(ref_tol > 0.0)) throw std::runtime_error("config: ref_tol <= 0");
    if (!(fit_window > 0.0 && fit_window <= 1.0))
      throw std::runtime_error("config: fit_window outside (0, 1]");
    if (workers < 1) throw std::runtime_error("config: workers < 1");
    schedules.validate();
  }
};

inline std::vector<std::uint64_t> default_seed_list(std::uint64_t count) {
  if (count < 1) throw std::runtime_error("seed count < 1");
  std::vector<std::uint64_t> seeds(count);
  for (std::uint64_t k = 0; k < count; ++k) seeds[k] = k + 1;
  return seeds;
}

inline std::string to_string(AlgorithmKind a) {
  return a == AlgorithmKind::Sdl ? "sdl" : "single_shot";
}
inline std::string to_string(GameKind g) {
  return g == GameKind::Cournot ? "cournot" : "duopoly";
}
inline std::string to_string(ProjectionMode m) {
  return m == ProjectionMode::FullSet ? "full" : "hyperplane";
}

inline AlgorithmKind algorithm_from_string(const std::string& s) {
  if (s == "sdl") return AlgorithmKind::Sdl;
  if (s == "single_shot") return AlgorithmKind::SingleShot;
  throw std::runtime_error("config: algorithm must be sdl or single_shot, got '" +
                           s + "'");
}
inline GameKind game_from_string(const std::string& s) {
  if (s == "cournot") return GameKind::Cournot;
  if (s == "duopoly") return GameKind::Duopoly;
  throw std::runtime_error("config: game must be cournot or duopoly, got '" + s +
                           "'");
}
inline ProjectionMode projection_from_string(const std::string& s) {
  if (s == "full") return ProjectionMode::FullSet;
  if (s == "hyperplane") return ProjectionMode::HyperplaneOnly;
  throw std::runtime_error(
      "config: projection must be full or hyperplane, got '" + s + "'");
}

inline ExperimentConfig config_from_text(const std::string& text) {
  auto kv = parse_key_values(text);
  ExperimentConfig cfg;
  auto take = [&kv](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::string();
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto v = take("name"); !v.empty()) cfg.name = v;
  if (auto v = take("game"); !v.empty()) cfg.game = game_from_string(v);
  if (auto v = take("players"); !v.empty())
    cfg.players = static_cast<std::size_t>(parse_u64(v));
  if (auto v = take("markets"); !v.empty())
    cfg.markets = static_cast<std::size_t>(parse_u64(v));
  if (auto v = take("instance_seed"); !v.empty()) cfg.instance_seed = parse_u64(v);
  if (auto v = take("algorithm"); !v.empty())
    cfg.algorithm = algorithm_from_string(v);
  if (auto v = take("projection"); !v.empty())
    cfg.projection = projection_from_string(v);
  if (auto v = take("gamma"); !v.empty()) cfg.schedules.gamma = parse_double(v);
  if (auto v = take("ell0"); !v.empty()) cfg.schedules.ell0 = parse_u64(v);
  if (auto v = take("p"); !v.empty()) cfg.schedules.p = parse_double(v);
  if (auto v = take("h0"); !v.empty()) cfg.schedules.h0 = parse_double(v);
  if (auto v = take("iters"); !v.empty()) cfg.iters = parse_u64(v);
  if (auto v = take("seeds"); !v.empty())
    cfg.seeds = default_seed_list(parse_u64(v));
  if (auto v = take("seed_list"); !v.empty()) {
    cfg.seeds.clear();
    for (const auto& item : parse_list(v)) cfg.seeds.push_back(parse_u64(item));
  }
  if (auto v = take("record_every"); !v.empty()) cfg.record_every = parse_u64(v);
  if (auto v = take("ref_tol"); !v.empty()) cfg.ref_tol = parse_double(v);
  if (auto v = take("ref_max_iter"); !v.empty()) cfg.ref_max_iter = parse_u64(v);
  if (auto v = take("fit_window"); !v.empty()) cfg.fit_window = parse_double(v);
  if (auto v = take("workers"); !v.empty())
    cfg.workers = static_cast<std::size_t>(parse_u64(v));
  if (!kv.empty())
    throw std::runtime_error("config: unknown key '" + kv.begin()->first + "'");
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  return config_from_text(read_text_file(path));
}

// Canonical form: fixed key order, seeds as an explicit list.
inline std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "name=" << cfg.name << '\n';
  os << "game=" << to_string(cfg.game) << '\n';
  if (cfg.game == GameKind::Cournot) {
    os << "players=" << cfg.players << '\n';
    os << "markets=" << cfg.markets << '\n';
    os << "instance_seed=" << cfg.instance_seed << '\n';
  }
  os << "algorithm=" << to_string(cfg.algorithm) << '\n';
  os << "projection=" << to_string(cfg.projection) << '\n';
  os << "gamma=" << format_double(cfg.schedules.gamma) << '\n';
  os << "ell0=" << cfg.schedules.ell0 << '\n';
  os << "p=" << format_double(cfg.schedules.p) << '\n';
  os << "h0=" << format_double(cfg.schedules.h0) << '\n';
  os << "iters=" << cfg.iters << '\n';
  os << "seed_list=";
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k)
    os << (k ? "," : "") << cfg.seeds[k];
  os << '\n';
  os << "record_every=" << cfg.record_every << '\n';
  os << "ref_tol=" << format_double(cfg.ref_tol) << '\n';
  os << "ref_max_iter=" << cfg.ref_max_iter << '\n';
  os << "fit_window=" << format_double(cfg.fit_window) << '\n';
  os << "workers=" << cfg.workers << '\n';
  return os.str();
}

}  // namespace nashseek
