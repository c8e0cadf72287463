#include "irsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irsim {

namespace {

constexpr double kSpeedOfLight = 3.0e8;
constexpr double kBsHeight = 10.0;
constexpr double kIrsHeight = 10.0;
constexpr double kUeHeight = 1.5;
constexpr double kIrsOffset = 10.0;

// Axial hex coordinates of the first `count` cells on a spiral: center,
// then ring 1 counterclockwise, ring 2, ...
std::vector<std::pair<int, int>> hex_spiral(int count) {
  static constexpr int kDirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  std::vector<std::pair<int, int>> cells;
  cells.reserve(count);
  cells.emplace_back(0, 0);
  for (int ring = 1; static_cast<int>(cells.size()) < count; ++ring) {
    int q = ring * kDirs[4][0];
    int r = ring * kDirs[4][1];
    for (int side = 0; side < 6 && static_cast<int>(cells.size()) < count; ++side) {
      for (int step = 0; step < ring && static_cast<int>(cells.size()) < count; ++step) {
        cells.emplace_back(q, r);
        q += kDirs[side][0];
        r += kDirs[side][1];
      }
    }
  }
  return cells;
}

// p lies in the regular hexagon centered at the origin whose inradius is
// spacing/2, with flat sides facing the six lattice neighbors.
bool inside_hexagon(double x, double y, double spacing) {
  const double half = spacing / 2.0;
  for (int k = 0; k < 6; ++k) {
    const double ang = k * std::numbers::pi / 3.0;
    if (x * std::cos(ang) + y * std::sin(ang) > half + 1e-12) return false;
  }
  return true;
}

}  // namespace

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double Topology::hex_circumradius() const { return spacing_m / std::sqrt(3.0); }

Topology build_topology(const TopologyConfig& config, RngStream& stream) {
  if (config.cells < 1) throw std::invalid_argument("build_topology: cells must be >= 1");
  if (config.ues_per_cell < 1 || config.bs_antennas < 1 || config.irs_elements < 1) {
    throw std::invalid_argument("build_topology: counts must be >= 1");
  }
  if (!(config.bs_spacing_m > 0.0)) {
    throw std::invalid_argument("build_topology: spacing must be positive");
  }

  Topology topo;
  topo.spacing_m = config.bs_spacing_m;
  const double s = config.bs_spacing_m;
  const auto axial = hex_spiral(config.cells);
  for (const auto& [q, r] : axial) {
    const double cx = s * (q + 0.5 * r);
    const double cy = s * (std::sqrt(3.0) / 2.0) * r;
    topo.bs.push_back({cx, cy, kBsHeight});
    topo.irs.push_back({cx + kIrsOffset, cy, kIrsHeight});
    topo.bs_antennas.push_back(config.bs_antennas);
    topo.irs_elements.push_back(config.irs_elements);
  }

  const double rmax = topo.hex_circumradius();
  topo.ue.resize(config.cells);
  for (int cell = 0; cell < config.cells; ++cell) {
    for (int k = 0; k < config.ues_per_cell; ++k) {
      double x;
      double y;
      do {
        x = (2.0 * stream.uniform01() - 1.0) * rmax;
        y = (2.0 * stream.uniform01() - 1.0) * rmax;
      } while (!inside_hexagon(x, y, s));
      topo.ue[cell].push_back({topo.bs[cell].x + x, topo.bs[cell].y + y, kUeHeight});
    }
  }
  return topo;
}

double path_loss_db(double d_m, double alpha, const PathLossParams& params) {
  if (!(d_m > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  const double d = std::max(d_m, params.d0_m);
  return params.beta0_db - 10.0 * alpha * std::log10(d / params.d0_m);
}

double jakes_rho(double speed_kmh, double carrier_hz, double slot_s) {
  if (speed_kmh < 0.0) throw std::invalid_argument("jakes_rho: speed must be >= 0");
  const double doppler_hz = (speed_kmh / 3.6) * carrier_hz / kSpeedOfLight;
  return bessel_j0(2.0 * std::numbers::pi * doppler_hz * slot_s);
}

void ChannelSet::refresh(std::size_t link, bool ue_bs) {
  if (ue_bs) {
    h_ub_[link] = scaled(u_ub_[link], std::sqrt(beta_ub_[link]));
  } else {
    h_ui_[link] = scaled(u_ui_[link], std::sqrt(beta_ui_[link]));
  }
}

const CMat& ChannelSet::g_irs_irs(int from, int to) const {
  if (from == to) throw std::invalid_argument("g_irs_irs: no same-IRS channel");
  return g_ii_[from * cells_ + to];
}

ChannelSet init_channels(const Topology& topology, const PathLossParams& params, double rho,
                         RngStream& stream) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("init_channels: rho out of [0,1]");
  ChannelSet ch;
  const int L = topology.cells();
  ch.cells_ = L;
  ch.rho_ = rho;
  ch.ues_per_cell_.resize(L);
  ch.ue_offset_.resize(L);
  std::size_t total = 0;
  for (int i = 0; i < L; ++i) {
    ch.ues_per_cell_[i] = topology.ues(i);
    ch.ue_offset_[i] = total;
    total += topology.ues(i);
  }

  const std::size_t links = total * static_cast<std::size_t>(L);
  ch.beta_ub_.resize(links);
  ch.beta_ui_.resize(links);
  ch.u_ub_.resize(links);
  ch.u_ui_.resize(links);
  ch.h_ub_.resize(links);
  ch.h_ui_.resize(links);

  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < topology.ues(i); ++j) {
      for (int l = 0; l < L; ++l) {
        const std::size_t idx = ch.ub_index(i, j, l);
        const double d = distance(topology.ue[i][j], topology.bs[l]);
        ch.beta_ub_[idx] = db_to_linear(path_loss_db(d, params.alpha_ue_bs, params));
        ch.u_ub_[idx] = complex_gaussian(topology.bs_antennas[l], stream);
        ch.refresh(idx, true);
      }
    }
  }
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < topology.ues(i); ++j) {
      for (int r = 0; r < L; ++r) {
        const std::size_t idx = ch.ui_index(i, j, r);
        const double d = distance(topology.ue[i][j], topology.irs[r]);
        ch.beta_ui_[idx] = db_to_linear(path_loss_db(d, params.alpha_ue_irs, params));
        ch.u_ui_[idx] = complex_gaussian(topology.irs_elements[r], stream);
        ch.refresh(idx, false);
      }
    }
  }

  ch.g_ib_.resize(static_cast<std::size_t>(L) * L);
  for (int r = 0; r < L; ++r) {
    for (int l = 0; l < L; ++l) {
      const double d = distance(topology.irs[r], topology.bs[l]);
      const double scale = std::sqrt(db_to_linear(path_loss_db(d, params.alpha_irs_bs, params)));
      CMat g(topology.bs_antennas[l], topology.irs_elements[r]);
      for (std::size_t m = 0; m < g.rows(); ++m) {
        for (std::size_t n = 0; n < g.cols(); ++n) {
          g(m, n) = scale * stream.standard_complex_gaussian();
        }
      }
      ch.g_ib_[static_cast<std::size_t>(r) * L + l] = std::move(g);
    }
  }
  ch.g_ii_.resize(static_cast<std::size_t>(L) * L);
  for (int r1 = 0; r1 < L; ++r1) {
    for (int r2 = 0; r2 < L; ++r2) {
      if (r1 == r2) continue;
      const double d = distance(topology.irs[r1], topology.irs[r2]);
      const double scale = std::sqrt(db_to_linear(path_loss_db(d, params.alpha_irs_irs, params)));
      CMat g(topology.irs_elements[r2], topology.irs_elements[r1]);
      for (std::size_t m = 0; m < g.rows(); ++m) {
        for (std::size_t n = 0; n < g.cols(); ++n) {
          g(m, n) = scale * stream.standard_complex_gaussian();
        }
      }
      ch.g_ii_[static_cast<std::size_t>(r1) * L + r2] = std::move(g);
    }
  }
  return ch;
}

void advance_channels(ChannelSet& ch, RngStream& stream) {
  const double rho = ch.rho_;
  const double nu = std::sqrt(1.0 - rho * rho);
  for (std::size_t link = 0; link < ch.u_ub_.size(); ++link) {
    CVec& u = ch.u_ub_[link];
    for (std::size_t m = 0; m < u.size(); ++m) {
      u[m] = rho * u[m] + nu * stream.standard_complex_gaussian();
    }
    ch.refresh(link, true);
  }
  for (std::size_t link = 0; link < ch.u_ui_.size(); ++link) {
    CVec& u = ch.u_ui_[link];
    for (std::size_t m = 0; m < u.size(); ++m) {
      u[m] = rho * u[m] + nu * stream.standard_complex_gaussian();
    }
    ch.refresh(link, false);
  }
}

}  // namespace irsim
