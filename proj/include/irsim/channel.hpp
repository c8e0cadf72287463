#pragma once

#include <vector>

#include "irsim/numerics.hpp"

namespace irsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

/// Large-scale fading model beta = beta0 - 10 alpha log10(d/d0), in dB.
struct PathLossParams {
  double beta0_db = -30.0;
  double d0_m = 1.0;
  double alpha_ue_bs = 3.75;
  double alpha_ue_irs = 2.2;
  double alpha_irs_bs = 1.0;
  double alpha_irs_irs = 2.0;
};

struct TopologyConfig {
  int cells = 7;
  int ues_per_cell = 3;
  int bs_antennas = 5;
  int irs_elements = 5;
  double bs_spacing_m = 100.0;
};

/// Hexagonal-lattice network geometry. One BS and one IRS per cell.
struct Topology {
  double spacing_m = 100.0;
  std::vector<Vec3> bs;               // BS positions, 10 m height
  std::vector<Vec3> irs;              // IRS positions, 10 m height
  std::vector<std::vector<Vec3>> ue;  // [cell][ue], 1.5 m height
  std::vector<int> bs_antennas;       // M_l
  std::vector<int> irs_elements;      // N_r

  int cells() const { return static_cast<int>(bs.size()); }
  int ues(int cell) const { return static_cast<int>(ue[cell].size()); }
  /// Circumradius of the hexagonal cell (vertex distance from the BS).
  double hex_circumradius() const;
};

/// Cells laid out on spiral rings around the center cell; UEs placed
/// uniformly at random inside their cell's hexagon by rejection sampling.
Topology build_topology(const TopologyConfig& config, RngStream& stream);

/// beta(d) in dB. d is clamped below at d0; d <= 0 throws.
double path_loss_db(double d_m, double alpha, const PathLossParams& params);

/// Jakes time-correlation rho = J0(2 pi v f_c T / c).
double jakes_rho(double speed_kmh, double carrier_hz, double slot_s);

/// Every instantaneous channel of the network at one time slot. UE-side
/// links carry normalized Gauss-Markov fading states u with unit per-entry
/// variance; IRS-BS and IRS-IRS channels are stationary after init.
class ChannelSet {
 public:
  ChannelSet() = default;

  int cells() const { return cells_; }
  int ues(int cell) const { return ues_per_cell_[cell]; }
  double rho() const { return rho_; }

  const CVec& h_ue_bs(int cell, int ue, int bs) const { return h_ub_[ub_index(cell, ue, bs)]; }
  const CVec& h_ue_irs(int cell, int ue, int irs) const { return h_ui_[ui_index(cell, ue, irs)]; }
  const CMat& g_irs_bs(int irs, int bs) const { return g_ib_[irs * cells_ + bs]; }
  /// Channel from IRS `from` to IRS `to` (N_to x N_from). Requires from != to.
  const CMat& g_irs_irs(int from, int to) const;

  const CVec& u_ue_bs(int cell, int ue, int bs) const { return u_ub_[ub_index(cell, ue, bs)]; }
  const CVec& u_ue_irs(int cell, int ue, int irs) const { return u_ui_[ui_index(cell, ue, irs)]; }
  double beta_ue_bs(int cell, int ue, int bs) const { return beta_ub_[ub_index(cell, ue, bs)]; }
  double beta_ue_irs(int cell, int ue, int irs) const { return beta_ui_[ui_index(cell, ue, irs)]; }

 private:
  friend ChannelSet init_channels(const Topology&, const PathLossParams&, double, RngStream&);
  friend void advance_channels(ChannelSet&, RngStream&);

  std::size_t ub_index(int cell, int ue, int bs) const {
    return (ue_offset_[cell] + ue) * static_cast<std::size_t>(cells_) + bs;
  }
  std::size_t ui_index(int cell, int ue, int irs) const { return ub_index(cell, ue, irs); }
  void refresh(std::size_t link, bool ue_bs);

  int cells_ = 0;
  double rho_ = 1.0;
  std::vector<int> ues_per_cell_;
  std::vector<std::size_t> ue_offset_;  // cumulative UE counts
  std::vector<double> beta_ub_, beta_ui_;
  std::vector<CVec> u_ub_, u_ui_;  // fading states, CN(0, I) marginals
  std::vector<CVec> h_ub_, h_ui_;  // sqrt(beta) * u
  std::vector<CMat> g_ib_;         // [irs * L + bs]
  std::vector<CMat> g_ii_;         // [from * L + to], diagonal unused
};

ChannelSet init_channels(const Topology& topology, const PathLossParams& params, double rho,
                         RngStream& stream);

/// One Gauss-Markov step u[t] = rho u[t-T] + sqrt(1-rho^2) n for every
/// UE-BS and UE-IRS link, in a fixed link order. IRS-side channels are
/// untouched.
void advance_channels(ChannelSet& channels, RngStream& stream);

}  // namespace irsim
