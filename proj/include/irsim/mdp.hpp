#pragma once

#include <vector>

#include "irsim/codebook.hpp"
#include "irsim/signal.hpp"

namespace irsim {

/// One cell's design variables: indices into the power set and codebooks
/// plus the resolved values. Resolved values are refreshed whenever an
/// index changes (resolve_variables / apply_action).
struct NetworkVariables {
  std::vector<int> power_idx;     // one per local UE
  std::vector<int> combiner_idx;  // one per local UE
  int irs_idx = 0;
  bool irs_off = false;  // all-zero beamformer regardless of irs_idx

  std::vector<double> power_mw;
  std::vector<CVec> combiner;
  IrsBeamformer phi;
};

void resolve_variables(NetworkVariables& vars, const PowerSet& powers, const Codebook& combiners,
                       const Codebook& irs_codebook);

/// Dominantly interfering (B1, into this cell) and dominantly interfered
/// (B2, out of this cell) neighbor cells, in descending order of aggregate
/// effective-channel power; ties break to the lower cell index.
struct NeighborSets {
  std::vector<int> interfering;  // B(1)
  std::vector<int> interfered;   // B(2)
  bool degenerate = false;       // fewer other cells than requested
};

/// Scalar effective powers, AGC norms, SINRs and rates of the whole
/// network at one measurement epoch.
class SlotMeasurements {
 public:
  SlotMeasurements() = default;
  SlotMeasurements(int cells, int ues_per_cell);

  int cells() const { return cells_; }
  int ues() const { return ues_; }

  /// |z_{bs,combiner}^H h_hat_(cell,ue),bs|^2.
  double scalar(int bs, int combiner, int cell, int ue) const;
  double& scalar(int bs, int combiner, int cell, int ue);
  /// ||h_hat_(cell,ue),bs||^2.
  double norm_sq(int bs, int cell, int ue) const;
  double& norm_sq(int bs, int cell, int ue);
  double sinr(int cell, int ue) const;
  double& sinr(int cell, int ue);
  double rate(int cell, int ue) const;
  double& rate(int cell, int ue);
  double sum_rate(int cell) const;

 private:
  int cells_ = 0;
  int ues_ = 0;
  std::vector<double> scalars_;  // [bs][combiner][cell][ue]
  std::vector<double> norms_;    // [bs][cell][ue]
  std::vector<double> sinr_;     // [cell][ue]
  std::vector<double> rate_;     // [cell][ue]
};

/// Measures the network with the given variables: effective channels per
/// Eq.-6 composition, scalar powers for every (BS, combiner, UE) triple,
/// norms, exact SINRs and rates. Uniform UE count per cell is required.
SlotMeasurements measure_network(const ChannelSet& channels,
                                 const std::vector<NetworkVariables>& vars, double noise_mw);

/// Local scalar powers |z_{l,k}^H h_tilde_(l,j),l|^2 measured on the
/// current channels with outdated variables (the first pilot phase of a
/// slot). Result: [cell][local ue j][combiner k].
std::vector<std::vector<std::vector<double>>> measure_local_outdated(
    const ChannelSet& channels, const std::vector<NetworkVariables>& outdated_vars);

NeighborSets neighbor_sets(const SlotMeasurements& meas, int cell, int b1, int b2);

/// State layout (flat, length 2K^2 + B1(K^2+1) + B2(K^2+1) + 2K + 2):
///   S1  local scalars at t-T (j-major KxK), then outdated scalars at t;
///   S2  from-neighbor scalars per B1 cell (j-major KxK), then the B1 cell
///       indices (rank order, -1 when absent);
///   S3  to-neighbor scalars per B2 cell (local k major, remote j minor),
///       then the B2 cell indices;
///   S4  power indices, combiner indices, IRS index, previous sum-rate.
/// Channel powers are encoded as clamp((10 log10 x + 140)/70, 0, 2) with
/// x = 0 mapped to the floor; indices and the sum-rate stay raw.
std::vector<double> build_state(int cell, const SlotMeasurements& previous,
                                const std::vector<std::vector<double>>& outdated_local,
                                const NeighborSets& neighbors, int b1, int b2,
                                const NetworkVariables& prev_vars, double prev_sum_rate);

int state_dim(int ues_per_cell, int b1, int b2);

/// dB-domain state encoding of one channel power.
double encode_channel_power(double x);

/// Little-endian positional decode of an action index into per-slot index
/// gradients. Arity 2 maps digits {0,1} to {-1,+1}; arity 3 maps {0,1,2}
/// to {-1,0,+1}.
std::vector<int> decode_action(long long action_index, int arity, int slots);

/// Index update i[t] = i[t-T] + b[t] with saturation at the set bounds.
/// Gradients are ordered [K powers, (K combiners when present), IRS];
/// sizes K+1 and 2K+1 are accepted. Resolved values are re-looked-up.
void apply_action(NetworkVariables& vars, const std::vector<int>& gradients,
                  const PowerSet& powers, const Codebook& combiners, const Codebook& irs_codebook);

/// Rates BS `bs` can form for its own UEs from its measured scalars:
/// log2(1 + S / (measured interference + noise)), measured_cells being the
/// cells whose UE scalars the BS holds (own cell + B1 neighbors).
std::vector<double> measured_scope_rates(const SlotMeasurements& meas, int bs,
                                         const std::vector<int>& measured_cells, double noise_mw);

/// Rate loss P_{offender,bs}: interference-free rate (excluding the
/// offender cell's UEs from the measured interference) minus rates[j],
/// summed over local UEs and clamped below at zero.
double compute_penalty(const SlotMeasurements& meas, int bs, int offender_cell,
                       const std::vector<int>& measured_cells, const std::vector<double>& rates,
                       double noise_mw);

/// r = sum of local rates - sum of received penalties.
double compute_reward(const std::vector<double>& local_rates,
                      const std::vector<double>& penalties);

/// Payload BS `from_bs` sends to a cell it is interfered by: the scalar
/// powers of that cell's UEs measured at from_bs ([local ue k][combiner j])
/// and the sum-penalty.
struct ExchangeMessage {
  int from_bs = 0;
  std::vector<std::vector<double>> scalar_powers;
  double penalty = 0.0;
};

/// Inbox per cell: one message from each dominantly-interfered neighbor
/// i in B(2), carrying slot measurements scoped to i's own measured cells.
std::vector<std::vector<ExchangeMessage>> exchange_messages(
    const SlotMeasurements& meas, const std::vector<NeighborSets>& neighbors, double noise_mw);

}  // namespace irsim
