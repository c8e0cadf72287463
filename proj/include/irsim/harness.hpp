#pragma once

#include <string>
#include <vector>

#include "irsim/config.hpp"
#include "irsim/mdp.hpp"

namespace irsim {

struct UeRecord {
  long long slot = 0;
  int cell = 0;
  int ue = 0;
  double sinr_db = 0.0;
  double rate = 0.0;
  int power_idx = 0;
  int combiner_idx = 0;
};

struct BsRecord {
  long long slot = 0;
  int cell = 0;
  double reward = 0.0;
  double penalty_sum = 0.0;
  double epsilon = 0.0;
  double loss = 0.0;
  int irs_idx = 0;
};

struct RunResult {
  std::vector<UeRecord> ue_rows;
  std::vector<BsRecord> bs_rows;
  nlohmann::json summary;
  nlohmann::json topology_dump;   // present when config.dump_topology
  nlohmann::json codebooks_dump;  // present when config.dump_codebooks
};

/// Per-slot baseline variable selection (powers, IRS index, and combiners
/// for the non-MRC schemes). MRC combiners are assigned afterwards from
/// the resolved network-wide beamformers via apply_mrc_combiners.
void baseline_select_indices(Scheme scheme, NetworkVariables& vars, const PowerSet& powers,
                             const Codebook& combiners, const Codebook& irs_codebook,
                             RngStream& stream);

/// Index of the power-set entry whose linear value is closest to target.
int nearest_power_index(const PowerSet& powers, double target_mw);

/// Re-selects every cell's combiners by MRC on the local vector effective
/// channels (uses all cells' current beamformers and powers).
void apply_mrc_combiners(std::vector<NetworkVariables>& vars, const ChannelSet& channels,
                         const std::vector<Codebook>& combiner_codebooks);

/// Trailing-window mean: out[n] = mean(series[max(0, n-window+1) .. n]).
std::vector<double> moving_average(const std::vector<double>& series, std::size_t window);

/// Executes the full slot loop for the configured scheme.
RunResult run_scenario(const SimConfig& config);

/// Writes ue_records.csv, bs_records.csv, summary.json and the optional
/// dumps into config.out_dir.
void write_outputs(const RunResult& result, const SimConfig& config);

}  // namespace irsim
