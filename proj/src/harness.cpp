#include "irsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace irsim {

namespace {

struct SchemeShape {
  int arity = 2;
  int slots = 0;  // action slots
  int hidden1 = 0;
  int hidden2 = 0;
};

SchemeShape dqn_shape(Scheme scheme, int ues) {
  switch (scheme) {
    case Scheme::kDqn1:
      return {2, 2 * ues + 1, 70, 100};
    case Scheme::kDqn2:
      return {2, ues + 1, 40, 30};
    case Scheme::kDqn3:
      return {3, ues + 1, 70, 70};
    default:
      throw std::logic_error("dqn_shape: not a DQN scheme");
  }
}

long long action_count(int arity, int slots) {
  long long n = 1;
  for (int i = 0; i < slots; ++i) n *= arity;
  return n;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double sinr_to_db(double sinr) { return 10.0 * std::log10(std::max(sinr, 1e-300)); }

nlohmann::json topology_to_json(const Topology& topo) {
  nlohmann::json cells = nlohmann::json::array();
  for (int l = 0; l < topo.cells(); ++l) {
    nlohmann::json ues = nlohmann::json::array();
    for (int k = 0; k < topo.ues(l); ++k) {
      ues.push_back({topo.ue[l][k].x, topo.ue[l][k].y, topo.ue[l][k].z});
    }
    cells.push_back({{"cell", l},
                     {"bs", {topo.bs[l].x, topo.bs[l].y, topo.bs[l].z}},
                     {"irs", {topo.irs[l].x, topo.irs[l].y, topo.irs[l].z}},
                     {"bs_antennas", topo.bs_antennas[l]},
                     {"irs_elements", topo.irs_elements[l]},
                     {"ues", ues}});
  }
  return {{"spacing_m", topo.spacing_m}, {"cells", cells}};
}

nlohmann::json codebook_to_json(const Codebook& book) {
  nlohmann::json words = nlohmann::json::array();
  for (int i = 0; i < book.size(); ++i) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t n = 0; n < book.word(i).size(); ++n) {
      entries.push_back({book.word(i)[n].real(), book.word(i)[n].imag()});
    }
    words.push_back(entries);
  }
  return words;
}

std::vector<double> local_rates(const SlotMeasurements& meas, int cell) {
  std::vector<double> rates(meas.ues());
  for (int k = 0; k < meas.ues(); ++k) rates[k] = meas.rate(cell, k);
  return rates;
}

}  // namespace

int nearest_power_index(const PowerSet& powers, double target_mw) {
  int best = 0;
  double best_dist = std::abs(powers.value_mw(0) - target_mw);
  for (int i = 1; i < powers.size(); ++i) {
    const double d = std::abs(powers.value_mw(i) - target_mw);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

void baseline_select_indices(Scheme scheme, NetworkVariables& vars, const PowerSet& powers,
                             const Codebook& combiners, const Codebook& irs_codebook,
                             RngStream& stream) {
  const int k = static_cast<int>(vars.power_idx.size());
  switch (scheme) {
    case Scheme::kRrr:
    case Scheme::kRrm:
      for (int i = 0; i < k; ++i) {
        vars.power_idx[i] = static_cast<int>(stream.uniform_index(powers.size()));
      }
      break;
    case Scheme::kMrr:
    case Scheme::kMrm:
    case Scheme::kMmNoIrs:
      for (int i = 0; i < k; ++i) vars.power_idx[i] = powers.size() - 1;
      break;
    case Scheme::kFrm: {
      const int idx = nearest_power_index(powers, 0.25 * powers.value_mw(powers.size() - 1));
      for (int i = 0; i < k; ++i) vars.power_idx[i] = idx;
      break;
    }
    default:
      throw std::invalid_argument("baseline_select_indices: not a baseline scheme");
  }
  if (scheme == Scheme::kRrr || scheme == Scheme::kMrr) {
    for (int i = 0; i < k; ++i) {
      vars.combiner_idx[i] = static_cast<int>(stream.uniform_index(combiners.size()));
    }
  }
  if (scheme == Scheme::kMmNoIrs) {
    vars.irs_off = true;
  } else {
    vars.irs_idx = static_cast<int>(stream.uniform_index(irs_codebook.size()));
  }
  resolve_variables(vars, powers, combiners, irs_codebook);
}

void apply_mrc_combiners(std::vector<NetworkVariables>& vars, const ChannelSet& channels,
                         const std::vector<Codebook>& combiner_codebooks) {
  std::vector<IrsBeamformer> phis;
  phis.reserve(vars.size());
  for (const auto& v : vars) phis.push_back(v.phi);
  for (int cell = 0; cell < channels.cells(); ++cell) {
    NetworkVariables& v = vars[cell];
    for (int k = 0; k < channels.ues(cell); ++k) {
      const CVec h = effective_channel(channels, phis, v.power_mw[k], {cell, k}, cell);
      v.combiner_idx[k] = mrc_select(combiner_codebooks[cell], h);
      v.combiner[k] = combiner_codebooks[cell].word(v.combiner_idx[k]);
    }
  }
}

std::vector<double> moving_average(const std::vector<double>& series, std::size_t window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < series.size(); ++n) {
    acc += series[n];
    if (n >= window) acc -= series[n - window];
    const std::size_t count = std::min(n + 1, window);
    out[n] = acc / static_cast<double>(count);
  }
  return out;
}

RunResult run_scenario(const SimConfig& config) {
  validate_config(config);
  const int L = config.cells;
  const int K = config.ues_per_cell;
  const double noise_mw = config.noise_mw();
  const double rho = config.effective_rho();
  const Scheme scheme = config.scheme;
  const bool is_dqn = scheme_is_dqn(scheme);
  const bool uses_mrc = scheme_uses_mrc(scheme);
  const std::uint64_t seed = config.seed;

  // Stream registry: every consumer of randomness appears here once.
  RngStream topo_stream(seed, "topology/ue");
  RngStream channel_init_stream(seed, "channel/init");
  RngStream channel_evolve_stream(seed, "channel/evolve");

  const TopologyConfig tc{config.cells, config.ues_per_cell, config.bs_antennas,
                          config.irs_elements, config.bs_spacing_m};
  const Topology topo = build_topology(tc, topo_stream);
  ChannelSet channels = init_channels(topo, config.path_loss, rho, channel_init_stream);

  const PowerSet powers = build_power_set(db_to_linear(config.pmin_dbm),
                                          db_to_linear(config.pmax_dbm), config.power_levels);
  std::vector<Codebook> zbooks;
  std::vector<Codebook> qbooks;
  for (int l = 0; l < L; ++l) {
    RngStream zs(seed, "codebook/combiner/" + std::to_string(l));
    zbooks.push_back(build_combiner_codebook(config.bs_antennas, config.combiner_codebook_size, zs));
    RngStream qs(seed, "codebook/irs/" + std::to_string(l));
    qbooks.push_back(build_irs_codebook(config.irs_elements, config.irs_codebook_size, qs));
  }

  SchemeShape shape{};
  long long num_actions = 0;
  std::vector<QNetwork> nets;
  std::vector<ExperiencePool> pools;
  std::vector<RngStream> policy_streams;
  std::vector<RngStream> replay_streams;
  std::vector<RngStream> baseline_streams;
  const int state_len = state_dim(K, config.b1, config.b2);
  if (is_dqn) {
    shape = dqn_shape(scheme, K);
    num_actions = action_count(shape.arity, shape.slots);
    for (int l = 0; l < L; ++l) {
      RngStream init(seed, "agent/" + std::to_string(l) + "/init");
      nets.emplace_back(state_len, shape.hidden1, shape.hidden2, static_cast<int>(num_actions),
                        init);
      pools.emplace_back(config.agent.pool_capacity);
      policy_streams.emplace_back(seed, "agent/" + std::to_string(l) + "/policy");
      replay_streams.emplace_back(seed, "agent/" + std::to_string(l) + "/replay");
    }
  } else {
    for (int l = 0; l < L; ++l) {
      baseline_streams.emplace_back(seed, "baseline/" + std::to_string(l));
    }
  }

  // Slot 0: random variable initialization, then (DQN) one random action.
  std::vector<NetworkVariables> vars(L);
  for (int l = 0; l < L; ++l) {
    vars[l].power_idx.assign(K, 0);
    vars[l].combiner_idx.assign(K, 0);
  }
  if (is_dqn) {
    for (int l = 0; l < L; ++l) {
      RngStream vs(seed, "agent/" + std::to_string(l) + "/vars0");
      for (int k = 0; k < K; ++k) {
        vars[l].power_idx[k] = static_cast<int>(vs.uniform_index(powers.size()));
        vars[l].combiner_idx[k] = static_cast<int>(vs.uniform_index(zbooks[l].size()));
      }
      vars[l].irs_idx = static_cast<int>(vs.uniform_index(qbooks[l].size()));
      resolve_variables(vars[l], powers, zbooks[l], qbooks[l]);
      const long long a0 = static_cast<long long>(policy_streams[l].uniform_index(
          static_cast<std::size_t>(num_actions)));
      apply_action(vars[l], decode_action(a0, shape.arity, shape.slots), powers, zbooks[l],
                   qbooks[l]);
    }
  } else {
    for (int l = 0; l < L; ++l) {
      baseline_select_indices(scheme, vars[l], powers, zbooks[l], qbooks[l],
                              baseline_streams[l]);
    }
  }
  if (uses_mrc) apply_mrc_combiners(vars, channels, zbooks);

  RunResult result;
  if (config.slots > 0) {
    result.ue_rows.reserve(static_cast<std::size_t>(config.slots) * L * K);
    result.bs_rows.reserve(static_cast<std::size_t>(config.slots) * L);
  }
  std::vector<double> slot_mean_rate;
  std::vector<double> reward_sums(L, 0.0);

  std::vector<double> eps(L, config.agent.epsilon0);
  std::vector<double> losses(L, 0.0);
  std::vector<std::vector<double>> states(L);
  std::vector<long long> actions(L, 0);
  std::vector<double> rewards(L, 0.0);
  bool have_transition = false;  // (state, action, reward) of previous slot held

  SlotMeasurements prev_obs;

  auto record_slot = [&](long long slot_index, const SlotMeasurements& obs,
                         const std::vector<double>& slot_rewards,
                         const std::vector<double>& penalty_sums) {
    double rate_acc = 0.0;
    for (int l = 0; l < L; ++l) {
      for (int k = 0; k < K; ++k) {
        const double rate = obs.rate(l, k);
        if (!std::isfinite(rate)) {
          throw NumericalError("non-finite rate at slot " + std::to_string(slot_index));
        }
        rate_acc += rate;
        result.ue_rows.push_back({slot_index, l, k, sinr_to_db(obs.sinr(l, k)), rate,
                                  vars[l].power_idx[k], vars[l].combiner_idx[k]});
      }
      if (!std::isfinite(slot_rewards[l]) || !std::isfinite(losses[l])) {
        throw NumericalError("non-finite reward/loss at slot " + std::to_string(slot_index));
      }
      result.bs_rows.push_back({slot_index, l, slot_rewards[l], penalty_sums[l], eps[l],
                                losses[l], vars[l].irs_off ? -1 : vars[l].irs_idx});
      reward_sums[l] += slot_rewards[l];
    }
    slot_mean_rate.push_back(rate_acc / (L * K));
  };

  if (config.slots > 0) {
    SlotMeasurements obs = measure_network(channels, vars, noise_mw);
    std::vector<NeighborSets> nbrs(L);
    for (int l = 0; l < L; ++l) nbrs[l] = neighbor_sets(obs, l, config.b1, config.b2);
    const auto inboxes = exchange_messages(obs, nbrs, noise_mw);
    std::vector<double> slot_rewards(L, 0.0);
    std::vector<double> penalty_sums(L, 0.0);
    for (int l = 0; l < L; ++l) {
      std::vector<double> pens;
      for (const auto& msg : inboxes[l]) pens.push_back(msg.penalty);
      penalty_sums[l] = std::accumulate(pens.begin(), pens.end(), 0.0);
      slot_rewards[l] = compute_reward(local_rates(obs, l), pens);
    }
    record_slot(0, obs, slot_rewards, penalty_sums);
    prev_obs = std::move(obs);
  }

  for (long long slot = 1; slot < config.slots; ++slot) {
    advance_channels(channels, channel_evolve_stream);
    const auto outdated = measure_local_outdated(channels, vars);
    std::vector<NeighborSets> nbrs(L);
    for (int l = 0; l < L; ++l) nbrs[l] = neighbor_sets(prev_obs, l, config.b1, config.b2);

    if (is_dqn) {
      std::vector<std::vector<double>> next_states(L);
      for (int l = 0; l < L; ++l) {
        next_states[l] = build_state(l, prev_obs, outdated[l], nbrs[l], config.b1, config.b2,
                                     vars[l], prev_obs.sum_rate(l));
      }
      if (have_transition) {
        for (int l = 0; l < L; ++l) {
          pools[l].push({std::move(states[l]), static_cast<int>(actions[l]), rewards[l],
                         next_states[l]});
          losses[l] = 0.0;
          const auto batch = pools[l].sample(config.agent.batch_size, replay_streams[l]);
          if (!batch.empty()) {
            losses[l] = nets[l].train_step(batch, config.agent);
            if (slot % config.agent.align_every == 0) nets[l].align_target();
          }
        }
      }
      states = std::move(next_states);
      for (int l = 0; l < L; ++l) {
        actions[l] = select_action(nets[l], states[l], eps[l], policy_streams[l]);
        apply_action(vars[l], decode_action(actions[l], shape.arity, shape.slots), powers,
                     zbooks[l], qbooks[l]);
      }
      have_transition = true;
    } else {
      for (int l = 0; l < L; ++l) {
        baseline_select_indices(scheme, vars[l], powers, zbooks[l], qbooks[l],
                                baseline_streams[l]);
      }
    }
    if (uses_mrc) apply_mrc_combiners(vars, channels, zbooks);

    SlotMeasurements obs = measure_network(channels, vars, noise_mw);
    const auto inboxes = exchange_messages(obs, nbrs, noise_mw);
    std::vector<double> slot_rewards(L, 0.0);
    std::vector<double> penalty_sums(L, 0.0);
    for (int l = 0; l < L; ++l) {
      std::vector<double> pens;
      for (const auto& msg : inboxes[l]) pens.push_back(msg.penalty);
      penalty_sums[l] = std::accumulate(pens.begin(), pens.end(), 0.0);
      slot_rewards[l] = compute_reward(local_rates(obs, l), pens);
    }
    rewards = slot_rewards;
    record_slot(slot, obs, slot_rewards, penalty_sums);
    for (int l = 0; l < L; ++l) eps[l] = epsilon_decay(eps[l], config.agent);
    prev_obs = std::move(obs);
  }

  const auto ma = moving_average(slot_mean_rate, 1000);
  const double final_ma = ma.empty() ? 0.0 : ma.back();
  const double mean_rate =
      slot_mean_rate.empty()
          ? 0.0
          : std::accumulate(slot_mean_rate.begin(), slot_mean_rate.end(), 0.0) /
                static_cast<double>(slot_mean_rate.size());
  nlohmann::json per_cell = nlohmann::json::array();
  for (int l = 0; l < L; ++l) {
    per_cell.push_back(config.slots > 0 ? reward_sums[l] / static_cast<double>(config.slots)
                                        : 0.0);
  }
  result.summary = {{"scheme", to_string(scheme)},
                    {"slots", config.slots},
                    {"final_ma_rate", final_ma},
                    {"mean_rate_all_ue", mean_rate},
                    {"config_hash", config_hash(config)},
                    {"runtime_s", static_cast<double>(config.slots) * config.slot_s},
                    {"per_cell_reward_mean", per_cell},
                    {"config", config.to_json()}};
  if (config.dump_topology) result.topology_dump = topology_to_json(topo);
  if (config.dump_codebooks) {
    nlohmann::json combiner = nlohmann::json::array();
    nlohmann::json irs = nlohmann::json::array();
    for (int l = 0; l < L; ++l) {
      combiner.push_back(codebook_to_json(zbooks[l]));
      irs.push_back(codebook_to_json(qbooks[l]));
    }
    result.codebooks_dump = {{"combiner", combiner}, {"irs", irs}};
  }
  return result;
}

void write_outputs(const RunResult& result, const SimConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + config.out_dir + "'");

  {
    std::ofstream ue(fs::path(config.out_dir) / "ue_records.csv");
    if (!ue) throw std::runtime_error("cannot write ue_records.csv");
    ue << "slot,cell,ue,sinr_db,rate_bps_hz,power_idx,combiner_idx\n";
    for (const auto& r : result.ue_rows) {
      ue << r.slot << ',' << r.cell << ',' << r.ue << ',' << fmt(r.sinr_db) << ',' << fmt(r.rate)
         << ',' << r.power_idx << ',' << r.combiner_idx << '\n';
    }
  }
  {
    std::ofstream bs(fs::path(config.out_dir) / "bs_records.csv");
    if (!bs) throw std::runtime_error("cannot write bs_records.csv");
    bs << "slot,cell,reward,penalty_sum,epsilon,loss,irs_idx\n";
    for (const auto& r : result.bs_rows) {
      bs << r.slot << ',' << r.cell << ',' << fmt(r.reward) << ',' << fmt(r.penalty_sum) << ','
         << fmt(r.epsilon) << ',' << fmt(r.loss) << ',' << r.irs_idx << '\n';
    }
  }
  {
    std::ofstream summary(fs::path(config.out_dir) / "summary.json");
    if (!summary) throw std::runtime_error("cannot write summary.json");
    summary << result.summary.dump(2) << '\n';
  }
  if (!result.topology_dump.is_null()) {
    std::ofstream topo(fs::path(config.out_dir) / "topology.json");
    topo << result.topology_dump.dump(2) << '\n';
  }
  if (!result.codebooks_dump.is_null()) {
    std::ofstream cb(fs::path(config.out_dir) / "codebooks.json");
    cb << result.codebooks_dump.dump(2) << '\n';
  }
}

}  // namespace irsim
