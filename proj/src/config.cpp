#include "irsim/config.hpp"

#include <fstream>

namespace irsim {

namespace {

const char* kSchemeNames[] = {"dqn1", "dqn2", "dqn3", "rrr", "mrr",
                              "mrm",  "frm",  "rrm",  "mm-noirs"};

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown config key '" + where + it.key() + "'");
  }
}

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

Scheme scheme_from_string(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kSchemeNames); ++i) {
    if (name == kSchemeNames[i]) return static_cast<Scheme>(i);
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string to_string(Scheme scheme) { return kSchemeNames[static_cast<int>(scheme)]; }

bool scheme_is_dqn(Scheme s) {
  return s == Scheme::kDqn1 || s == Scheme::kDqn2 || s == Scheme::kDqn3;
}

bool scheme_uses_mrc(Scheme s) {
  return s == Scheme::kDqn2 || s == Scheme::kDqn3 || s == Scheme::kMrm || s == Scheme::kFrm ||
         s == Scheme::kRrm || s == Scheme::kMmNoIrs;
}

double SimConfig::noise_mw() const { return db_to_linear(noise_dbm); }

double SimConfig::effective_rho() const {
  return speed_kmh >= 0.0 ? jakes_rho(speed_kmh, carrier_hz, slot_s) : rho;
}

nlohmann::json SimConfig::to_json() const {
  const double eps_decay = agent.epsilon_decay_factor > 0.0 ? agent.epsilon_decay_factor
                                                            : default_epsilon_decay_factor();
  return {
      {"topology",
       {{"cells", cells},
        {"ues_per_cell", ues_per_cell},
        {"bs_antennas", bs_antennas},
        {"irs_elements", irs_elements},
        {"bs_spacing_m", bs_spacing_m}}},
      {"channel",
       {{"rho", rho},
        {"speed_kmh", speed_kmh},
        {"carrier_hz", carrier_hz},
        {"slot_s", slot_s},
        {"noise_dbm", noise_dbm},
        {"beta0_db", path_loss.beta0_db},
        {"d0_m", path_loss.d0_m},
        {"alpha_ue_bs", path_loss.alpha_ue_bs},
        {"alpha_ue_irs", path_loss.alpha_ue_irs},
        {"alpha_irs_bs", path_loss.alpha_irs_bs},
        {"alpha_irs_irs", path_loss.alpha_irs_irs}}},
      {"codebooks",
       {{"power_levels", power_levels},
        {"pmin_dbm", pmin_dbm},
        {"pmax_dbm", pmax_dbm},
        {"combiner_size", combiner_codebook_size},
        {"irs_size", irs_codebook_size}}},
      {"mdp", {{"b1", b1}, {"b2", b2}}},
      {"agent",
       {{"gamma", agent.gamma},
        {"epsilon0", agent.epsilon0},
        {"epsilon_min", agent.epsilon_min},
        {"epsilon_decay_factor", eps_decay},
        {"batch_size", agent.batch_size},
        {"pool_capacity", agent.pool_capacity},
        {"align_every", agent.align_every},
        {"learning_rate", agent.learning_rate},
        {"rmsprop_decay", agent.rmsprop_decay},
        {"rmsprop_epsilon", agent.rmsprop_epsilon},
        {"huber_loss", agent.huber_loss}}},
      {"scenario", to_string(scheme)},
      {"slots", slots},
      {"seed", seed},
      {"out_dir", out_dir}};
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  SimConfig c;
  require_keys(j, {"topology", "channel", "codebooks", "mdp", "agent", "scenario", "slots",
                   "seed", "out_dir"},
               "");
  if (j.contains("topology")) {
    const auto& t = j["topology"];
    require_keys(t, {"cells", "ues_per_cell", "bs_antennas", "irs_elements", "bs_spacing_m"},
                 "topology.");
    get_if(t, "cells", c.cells);
    get_if(t, "ues_per_cell", c.ues_per_cell);
    get_if(t, "bs_antennas", c.bs_antennas);
    get_if(t, "irs_elements", c.irs_elements);
    get_if(t, "bs_spacing_m", c.bs_spacing_m);
  }
  if (j.contains("channel")) {
    const auto& ch = j["channel"];
    require_keys(ch,
                 {"rho", "speed_kmh", "carrier_hz", "slot_s", "noise_dbm", "beta0_db", "d0_m",
                  "alpha_ue_bs", "alpha_ue_irs", "alpha_irs_bs", "alpha_irs_irs"},
                 "channel.");
    get_if(ch, "rho", c.rho);
    get_if(ch, "speed_kmh", c.speed_kmh);
    get_if(ch, "carrier_hz", c.carrier_hz);
    get_if(ch, "slot_s", c.slot_s);
    get_if(ch, "noise_dbm", c.noise_dbm);
    get_if(ch, "beta0_db", c.path_loss.beta0_db);
    get_if(ch, "d0_m", c.path_loss.d0_m);
    get_if(ch, "alpha_ue_bs", c.path_loss.alpha_ue_bs);
    get_if(ch, "alpha_ue_irs", c.path_loss.alpha_ue_irs);
    get_if(ch, "alpha_irs_bs", c.path_loss.alpha_irs_bs);
    get_if(ch, "alpha_irs_irs", c.path_loss.alpha_irs_irs);
  }
  if (j.contains("codebooks")) {
    const auto& cb = j["codebooks"];
    require_keys(cb, {"power_levels", "pmin_dbm", "pmax_dbm", "combiner_size", "irs_size"},
                 "codebooks.");
    get_if(cb, "power_levels", c.power_levels);
    get_if(cb, "pmin_dbm", c.pmin_dbm);
    get_if(cb, "pmax_dbm", c.pmax_dbm);
    get_if(cb, "combiner_size", c.combiner_codebook_size);
    get_if(cb, "irs_size", c.irs_codebook_size);
  }
  if (j.contains("mdp")) {
    require_keys(j["mdp"], {"b1", "b2"}, "mdp.");
    get_if(j["mdp"], "b1", c.b1);
    get_if(j["mdp"], "b2", c.b2);
  }
  if (j.contains("agent")) {
    const auto& a = j["agent"];
    require_keys(a,
                 {"gamma", "epsilon0", "epsilon_min", "epsilon_decay_factor", "batch_size",
                  "pool_capacity", "align_every", "learning_rate", "rmsprop_decay",
                  "rmsprop_epsilon", "huber_loss"},
                 "agent.");
    get_if(a, "gamma", c.agent.gamma);
    get_if(a, "epsilon0", c.agent.epsilon0);
    get_if(a, "epsilon_min", c.agent.epsilon_min);
    get_if(a, "epsilon_decay_factor", c.agent.epsilon_decay_factor);
    get_if(a, "batch_size", c.agent.batch_size);
    get_if(a, "pool_capacity", c.agent.pool_capacity);
    get_if(a, "align_every", c.agent.align_every);
    get_if(a, "learning_rate", c.agent.learning_rate);
    get_if(a, "rmsprop_decay", c.agent.rmsprop_decay);
    get_if(a, "rmsprop_epsilon", c.agent.rmsprop_epsilon);
    get_if(a, "huber_loss", c.agent.huber_loss);
  }
  if (j.contains("scenario")) c.scheme = scheme_from_string(j["scenario"].get<std::string>());
  get_if(j, "slots", c.slots);
  get_if(j, "seed", c.seed);
  get_if(j, "out_dir", c.out_dir);
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return SimConfig::from_json(j);
}

void validate_config(const SimConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
  if (c.cells < 1) fail("cells must be >= 1");
  if (c.ues_per_cell < 1) fail("ues_per_cell must be >= 1");
  if (c.bs_antennas < 1 || c.irs_elements < 1) fail("antenna/element counts must be >= 1");
  if (!(c.bs_spacing_m > 0.0)) fail("bs_spacing_m must be positive");
  if (c.speed_kmh < 0.0 && !(c.rho >= 0.0 && c.rho <= 1.0)) fail("rho must lie in [0, 1]");
  if (!(c.slot_s > 0.0)) fail("slot_s must be positive");
  if (!(c.path_loss.d0_m > 0.0)) fail("d0_m must be positive");
  if (c.power_levels < 2) fail("power_levels must be >= 2");
  if (!(c.pmin_dbm < c.pmax_dbm)) fail("pmin_dbm must be below pmax_dbm");
  if (c.combiner_codebook_size < 1 || c.irs_codebook_size < 1) fail("codebook sizes must be >= 1");
  if (c.b1 < 1 || c.b2 < 1) fail("b1 and b2 must be >= 1");
  if (!(c.agent.gamma >= 0.0 && c.agent.gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(c.agent.epsilon0 >= c.agent.epsilon_min && c.agent.epsilon0 <= 1.0)) {
    fail("epsilon0 must lie in [epsilon_min, 1]");
  }
  if (c.agent.batch_size < 1 || c.agent.pool_capacity < c.agent.batch_size) {
    fail("need 1 <= batch_size <= pool_capacity");
  }
  if (c.agent.align_every < 1) fail("align_every must be >= 1");
  if (!(c.agent.learning_rate > 0.0)) fail("learning_rate must be positive");
  if (c.slots < 0) fail("slots must be >= 0");
}

std::string config_hash(const SimConfig& config) {
  const std::string canon = config.to_json().dump();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace irsim
