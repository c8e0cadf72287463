#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "irsim/channel.hpp"
#include "irsim/dqn.hpp"

#include "json.hpp"

namespace irsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a run produces a non-finite rate, reward or loss; the
/// message names the offending slot.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scheme { kDqn1, kDqn2, kDqn3, kRrr, kMrr, kMrm, kFrm, kRrm, kMmNoIrs };

Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme scheme);
bool scheme_is_dqn(Scheme scheme);
/// Schemes whose combiners are MRC-selected from the local vector
/// effective channels every slot (scenario 2).
bool scheme_uses_mrc(Scheme scheme);

struct SimConfig {
  // Topology.
  int cells = 7;
  int ues_per_cell = 3;
  int bs_antennas = 5;
  int irs_elements = 5;
  double bs_spacing_m = 100.0;
  // Channel. speed_kmh >= 0 derives rho via the Jakes model, else rho is
  // used directly.
  double rho = 0.999;
  double speed_kmh = -1.0;
  double carrier_hz = 2.5e9;
  double slot_s = 0.005;
  double noise_dbm = -114.0;
  PathLossParams path_loss;
  // Design spaces.
  int power_levels = 10;
  double pmin_dbm = 10.0;
  double pmax_dbm = 30.0;
  int combiner_codebook_size = 30;
  int irs_codebook_size = 30;
  // Information exchange.
  int b1 = 2;
  int b2 = 2;
  // Learning.
  AgentHyperparams agent;
  // Run.
  Scheme scheme = Scheme::kDqn2;
  long long slots = 20000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool dump_topology = false;
  bool dump_codebooks = false;

  double noise_mw() const;
  /// Effective time-correlation coefficient of the run.
  double effective_rho() const;

  nlohmann::json to_json() const;
  static SimConfig from_json(const nlohmann::json& j);
};

SimConfig load_config(const std::string& path);
void validate_config(const SimConfig& config);

/// Content fingerprint of the full canonical config; changes iff any
/// config field changes.
std::string config_hash(const SimConfig& config);

}  // namespace irsim
