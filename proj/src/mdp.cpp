#include "irsim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace irsim {

namespace {

std::vector<IrsBeamformer> resolve_beamformers(const std::vector<NetworkVariables>& vars) {
  std::vector<IrsBeamformer> phis;
  phis.reserve(vars.size());
  for (const auto& v : vars) phis.push_back(v.phi);
  return phis;
}

void check_uniform_ues(const ChannelSet& channels) {
  for (int i = 1; i < channels.cells(); ++i) {
    if (channels.ues(i) != channels.ues(0)) {
      throw std::invalid_argument("measurements require a uniform UE count per cell");
    }
  }
}

}  // namespace

void resolve_variables(NetworkVariables& vars, const PowerSet& powers, const Codebook& combiners,
                       const Codebook& irs_codebook) {
  const std::size_t k = vars.power_idx.size();
  if (vars.combiner_idx.size() != k) {
    throw std::invalid_argument("resolve_variables: index count mismatch");
  }
  vars.power_mw.resize(k);
  vars.combiner.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    vars.power_mw[i] = powers.value_mw(vars.power_idx[i]);
    vars.combiner[i] = combiners.word(vars.combiner_idx[i]);
  }
  if (vars.irs_off) {
    vars.phi = IrsBeamformer::off(irs_codebook.dim());
  } else {
    vars.phi = IrsBeamformer(irs_codebook.word(vars.irs_idx));
  }
}

SlotMeasurements::SlotMeasurements(int cells, int ues_per_cell)
    : cells_(cells),
      ues_(ues_per_cell),
      scalars_(static_cast<std::size_t>(cells) * ues_per_cell * cells * ues_per_cell, 0.0),
      norms_(static_cast<std::size_t>(cells) * cells * ues_per_cell, 0.0),
      sinr_(static_cast<std::size_t>(cells) * ues_per_cell, 0.0),
      rate_(static_cast<std::size_t>(cells) * ues_per_cell, 0.0) {}

double SlotMeasurements::scalar(int bs, int combiner, int cell, int ue) const {
  return scalars_[((static_cast<std::size_t>(bs) * ues_ + combiner) * cells_ + cell) * ues_ + ue];
}
double& SlotMeasurements::scalar(int bs, int combiner, int cell, int ue) {
  return scalars_[((static_cast<std::size_t>(bs) * ues_ + combiner) * cells_ + cell) * ues_ + ue];
}
double SlotMeasurements::norm_sq(int bs, int cell, int ue) const {
  return norms_[(static_cast<std::size_t>(bs) * cells_ + cell) * ues_ + ue];
}
double& SlotMeasurements::norm_sq(int bs, int cell, int ue) {
  return norms_[(static_cast<std::size_t>(bs) * cells_ + cell) * ues_ + ue];
}
double SlotMeasurements::sinr(int cell, int ue) const {
  return sinr_[static_cast<std::size_t>(cell) * ues_ + ue];
}
double& SlotMeasurements::sinr(int cell, int ue) {
  return sinr_[static_cast<std::size_t>(cell) * ues_ + ue];
}
double SlotMeasurements::rate(int cell, int ue) const {
  return rate_[static_cast<std::size_t>(cell) * ues_ + ue];
}
double& SlotMeasurements::rate(int cell, int ue) {
  return rate_[static_cast<std::size_t>(cell) * ues_ + ue];
}
double SlotMeasurements::sum_rate(int cell) const {
  double s = 0.0;
  for (int k = 0; k < ues_; ++k) s += rate(cell, k);
  return s;
}

SlotMeasurements measure_network(const ChannelSet& channels,
                                 const std::vector<NetworkVariables>& vars, double noise_mw) {
  check_uniform_ues(channels);
  const int L = channels.cells();
  const int K = channels.ues(0);
  SlotMeasurements meas(L, K);
  const auto phis = resolve_beamformers(vars);

  for (int bs = 0; bs < L; ++bs) {
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < K; ++j) {
        const CVec h =
            effective_channel(channels, phis, vars[i].power_mw[j], {i, j}, bs);
        const double n = norm2(h);
        meas.norm_sq(bs, i, j) = n * n;
        for (int k = 0; k < K; ++k) {
          meas.scalar(bs, k, i, j) = scalar_effective_power(vars[bs].combiner[k], h);
        }
      }
    }
  }
  for (int cell = 0; cell < L; ++cell) {
    for (int k = 0; k < K; ++k) {
      double interference = 0.0;
      for (int i = 0; i < L; ++i) {
        for (int j = 0; j < K; ++j) {
          if (i == cell && j == k) continue;
          interference += meas.scalar(cell, k, i, j);
        }
      }
      const double s = meas.scalar(cell, k, cell, k) / (interference + noise_mw);
      meas.sinr(cell, k) = s;
      meas.rate(cell, k) = achievable_rate(s);
    }
  }
  return meas;
}

std::vector<std::vector<std::vector<double>>> measure_local_outdated(
    const ChannelSet& channels, const std::vector<NetworkVariables>& outdated_vars) {
  check_uniform_ues(channels);
  const int L = channels.cells();
  const int K = channels.ues(0);
  const auto phis = resolve_beamformers(outdated_vars);
  std::vector<std::vector<std::vector<double>>> out(
      L, std::vector<std::vector<double>>(K, std::vector<double>(K, 0.0)));
  for (int cell = 0; cell < L; ++cell) {
    for (int j = 0; j < K; ++j) {
      const CVec h =
          effective_channel(channels, phis, outdated_vars[cell].power_mw[j], {cell, j}, cell);
      for (int k = 0; k < K; ++k) {
        out[cell][j][k] = scalar_effective_power(outdated_vars[cell].combiner[k], h);
      }
    }
  }
  return out;
}

namespace {

std::vector<int> top_cells(const std::vector<double>& score, int self, int count) {
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(score.size()); ++i) {
    if (i != self) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return score[a] > score[b]; });
  if (static_cast<int>(order.size()) > count) order.resize(count);
  return order;
}

}  // namespace

NeighborSets neighbor_sets(const SlotMeasurements& meas, int cell, int b1, int b2) {
  const int L = meas.cells();
  const int K = meas.ues();
  std::vector<double> into(L, 0.0);   // interference from cell i's UEs into this BS
  std::vector<double> out_of(L, 0.0);  // interference from local UEs into BS i
  for (int i = 0; i < L; ++i) {
    if (i == cell) continue;
    for (int j = 0; j < K; ++j) into[i] += meas.norm_sq(cell, i, j);
    for (int k = 0; k < K; ++k) out_of[i] += meas.norm_sq(i, cell, k);
  }
  NeighborSets sets;
  sets.interfering = top_cells(into, cell, b1);
  sets.interfered = top_cells(out_of, cell, b2);
  sets.degenerate = (L - 1 < b1) || (L - 1 < b2);
  return sets;
}

double encode_channel_power(double x) {
  if (!(x > 0.0)) return 0.0;
  return std::clamp((10.0 * std::log10(x) + 140.0) / 70.0, 0.0, 2.0);
}

int state_dim(int ues_per_cell, int b1, int b2) {
  const int k2 = ues_per_cell * ues_per_cell;
  return 2 * k2 + b1 * (k2 + 1) + b2 * (k2 + 1) + 2 * ues_per_cell + 2;
}

std::vector<double> build_state(int cell, const SlotMeasurements& previous,
                                const std::vector<std::vector<double>>& outdated_local,
                                const NeighborSets& neighbors, int b1, int b2,
                                const NetworkVariables& prev_vars, double prev_sum_rate) {
  const int K = previous.ues();
  if (static_cast<int>(outdated_local.size()) != K ||
      static_cast<int>(prev_vars.power_idx.size()) != K) {
    throw std::runtime_error("build_state: missing measurements");
  }
  std::vector<double> s;
  s.reserve(state_dim(K, b1, b2));
  // S1: local scalars, previous epoch then current-with-outdated-variables.
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) s.push_back(encode_channel_power(previous.scalar(cell, k, cell, j)));
  }
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) s.push_back(encode_channel_power(outdated_local[j][k]));
  }
  // S2: from-neighbor scalars + neighbor indices. Absent slots (fewer other
  // cells than b1) hold the encoding floor and index -1.
  for (int slot = 0; slot < b1; ++slot) {
    const bool have = slot < static_cast<int>(neighbors.interfering.size());
    const int i = have ? neighbors.interfering[slot] : -1;
    for (int j = 0; j < K; ++j) {
      for (int k = 0; k < K; ++k) {
        s.push_back(have ? encode_channel_power(previous.scalar(cell, k, i, j)) : 0.0);
      }
    }
  }
  for (int slot = 0; slot < b1; ++slot) {
    const bool have = slot < static_cast<int>(neighbors.interfering.size());
    s.push_back(have ? static_cast<double>(neighbors.interfering[slot]) : -1.0);
  }
  // S3: to-neighbor scalars + neighbor indices.
  for (int slot = 0; slot < b2; ++slot) {
    const bool have = slot < static_cast<int>(neighbors.interfered.size());
    const int i = have ? neighbors.interfered[slot] : -1;
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j) {
        s.push_back(have ? encode_channel_power(previous.scalar(i, j, cell, k)) : 0.0);
      }
    }
  }
  for (int slot = 0; slot < b2; ++slot) {
    const bool have = slot < static_cast<int>(neighbors.interfered.size());
    s.push_back(have ? static_cast<double>(neighbors.interfered[slot]) : -1.0);
  }
  // S4: previous variable indices and local sum-rate.
  for (int k = 0; k < K; ++k) s.push_back(static_cast<double>(prev_vars.power_idx[k]));
  for (int k = 0; k < K; ++k) s.push_back(static_cast<double>(prev_vars.combiner_idx[k]));
  s.push_back(static_cast<double>(prev_vars.irs_off ? -1 : prev_vars.irs_idx));
  s.push_back(prev_sum_rate);
  return s;
}

std::vector<int> decode_action(long long action_index, int arity, int slots) {
  if (arity != 2 && arity != 3) throw std::invalid_argument("decode_action: arity must be 2 or 3");
  if (slots < 1) throw std::invalid_argument("decode_action: slots must be >= 1");
  long long span = 1;
  for (int i = 0; i < slots; ++i) span *= arity;
  if (action_index < 0 || action_index >= span) {
    throw std::invalid_argument("decode_action: index out of range");
  }
  std::vector<int> grads(slots);
  long long rest = action_index;
  for (int i = 0; i < slots; ++i) {
    const int digit = static_cast<int>(rest % arity);
    rest /= arity;
    grads[i] = (arity == 2) ? (digit == 0 ? -1 : +1) : (digit - 1);
  }
  return grads;
}

void apply_action(NetworkVariables& vars, const std::vector<int>& gradients,
                  const PowerSet& powers, const Codebook& combiners,
                  const Codebook& irs_codebook) {
  const int k = static_cast<int>(vars.power_idx.size());
  const bool with_combiners = static_cast<int>(gradients.size()) == 2 * k + 1;
  if (!with_combiners && static_cast<int>(gradients.size()) != k + 1) {
    throw std::invalid_argument("apply_action: gradient count must be K+1 or 2K+1");
  }
  auto clamp_idx = [](int idx, int size) { return std::clamp(idx, 0, size - 1); };
  for (int i = 0; i < k; ++i) {
    vars.power_idx[i] = clamp_idx(vars.power_idx[i] + gradients[i], powers.size());
  }
  if (with_combiners) {
    for (int i = 0; i < k; ++i) {
      vars.combiner_idx[i] = clamp_idx(vars.combiner_idx[i] + gradients[k + i], combiners.size());
    }
  }
  vars.irs_idx = clamp_idx(vars.irs_idx + gradients.back(), irs_codebook.size());
  resolve_variables(vars, powers, combiners, irs_codebook);
}

std::vector<double> measured_scope_rates(const SlotMeasurements& meas, int bs,
                                         const std::vector<int>& measured_cells,
                                         double noise_mw) {
  const int K = meas.ues();
  std::vector<double> rates(K, 0.0);
  for (int j = 0; j < K; ++j) {
    double interference = 0.0;
    for (int cell : measured_cells) {
      for (int u = 0; u < K; ++u) {
        if (cell == bs && u == j) continue;
        interference += meas.scalar(bs, j, cell, u);
      }
    }
    rates[j] = achievable_rate(meas.scalar(bs, j, bs, j) / (interference + noise_mw));
  }
  return rates;
}

double compute_penalty(const SlotMeasurements& meas, int bs, int offender_cell,
                       const std::vector<int>& measured_cells, const std::vector<double>& rates,
                       double noise_mw) {
  const int K = meas.ues();
  double penalty = 0.0;
  for (int j = 0; j < K; ++j) {
    double interference = 0.0;
    for (int cell : measured_cells) {
      if (cell == offender_cell) continue;
      for (int u = 0; u < K; ++u) {
        if (cell == bs && u == j) continue;
        interference += meas.scalar(bs, j, cell, u);
      }
    }
    const double free_rate =
        achievable_rate(meas.scalar(bs, j, bs, j) / (interference + noise_mw));
    penalty += free_rate - rates[j];
  }
  return std::max(penalty, 0.0);
}

double compute_reward(const std::vector<double>& local_rates,
                      const std::vector<double>& penalties) {
  const double rate_sum = std::accumulate(local_rates.begin(), local_rates.end(), 0.0);
  const double penalty_sum = std::accumulate(penalties.begin(), penalties.end(), 0.0);
  return rate_sum - penalty_sum;
}

std::vector<std::vector<ExchangeMessage>> exchange_messages(
    const SlotMeasurements& meas, const std::vector<NeighborSets>& neighbors, double noise_mw) {
  const int L = meas.cells();
  const int K = meas.ues();
  std::vector<std::vector<ExchangeMessage>> inboxes(L);
  for (int cell = 0; cell < L; ++cell) {
    for (int from : neighbors[cell].interfered) {
      ExchangeMessage msg;
      msg.from_bs = from;
      msg.scalar_powers.assign(K, std::vector<double>(K, 0.0));
      for (int k = 0; k < K; ++k) {
        for (int j = 0; j < K; ++j) msg.scalar_powers[k][j] = meas.scalar(from, j, cell, k);
      }
      std::vector<int> scope = neighbors[from].interfering;
      scope.push_back(from);
      msg.penalty = compute_penalty(meas, from, cell, scope,
                                    measured_scope_rates(meas, from, scope, noise_mw), noise_mw);
      inboxes[cell].push_back(std::move(msg));
    }
  }
  return inboxes;
}

}  // namespace irsim
