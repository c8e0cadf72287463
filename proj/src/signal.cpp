#include "irsim/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace irsim {

namespace {

void check_beamformers(const ChannelSet& channels,
                       const std::vector<IrsBeamformer>& beamformers) {
  if (static_cast<int>(beamformers.size()) != channels.cells()) {
    throw std::invalid_argument("expected one beamformer per IRS");
  }
}

// Direct + single + double reflection composition without the sqrt(p)
// factor.
CVec compose_paths(const ChannelSet& ch, const std::vector<IrsBeamformer>& phis, UeRef ue,
                   int bs) {
  const int R = ch.cells();
  CVec sum = ch.h_ue_bs(ue.cell, ue.ue, bs);
  for (int r = 0; r < R; ++r) {
    const CVec bounced = hadamard(phis[r].phi(), ch.h_ue_irs(ue.cell, ue.ue, r));
    add_inplace(sum, matvec(ch.g_irs_bs(r, bs), bounced));
  }
  for (int r2 = 0; r2 < R; ++r2) {
    for (int r1 = 0; r1 < R; ++r1) {
      if (r1 == r2) continue;
      const CVec first = hadamard(phis[r1].phi(), ch.h_ue_irs(ue.cell, ue.ue, r1));
      const CVec second = hadamard(phis[r2].phi(), matvec(ch.g_irs_irs(r1, r2), first));
      add_inplace(sum, matvec(ch.g_irs_bs(r2, bs), second));
    }
  }
  return sum;
}

}  // namespace

IrsBeamformer::IrsBeamformer(CVec phi) : phi_(std::move(phi)) {
  for (std::size_t n = 0; n < phi_.size(); ++n) {
    if (std::abs(phi_[n]) > 1.0 + 1e-12) {
      throw std::invalid_argument("IrsBeamformer: entry modulus exceeds 1");
    }
  }
}

CVec effective_channel(const ChannelSet& channels, const std::vector<IrsBeamformer>& beamformers,
                       double power_mw, UeRef ue, int bs) {
  check_beamformers(channels, beamformers);
  if (power_mw < 0.0) throw std::invalid_argument("effective_channel: negative power");
  return scaled(compose_paths(channels, beamformers, ue, bs), std::sqrt(power_mw));
}

double scalar_effective_power(const CVec& combiner, const CVec& effective) {
  return std::norm(inner(combiner, effective));
}

double sinr_from_scalars(UeRef target, const std::vector<std::vector<double>>& scalars,
                         double noise_mw) {
  if (!(noise_mw > 0.0)) throw std::invalid_argument("sinr_from_scalars: noise must be positive");
  if (target.cell < 0 || target.cell >= static_cast<int>(scalars.size()) || target.ue < 0 ||
      target.ue >= static_cast<int>(scalars[target.cell].size())) {
    throw std::invalid_argument("sinr_from_scalars: target scalar missing");
  }
  double interference = 0.0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    for (std::size_t j = 0; j < scalars[i].size(); ++j) {
      if (static_cast<int>(i) == target.cell && static_cast<int>(j) == target.ue) continue;
      interference += scalars[i][j];
    }
  }
  return scalars[target.cell][target.ue] / (interference + noise_mw);
}

double sinr_direct(const ChannelSet& channels, const std::vector<IrsBeamformer>& beamformers,
                   const std::vector<std::vector<double>>& powers_mw, const CVec& combiner,
                   UeRef target, int bs, double noise_mw) {
  check_beamformers(channels, beamformers);
  if (!(noise_mw > 0.0)) throw std::invalid_argument("sinr_direct: noise must be positive");
  double signal = 0.0;
  double interference = 0.0;
  for (int i = 0; i < channels.cells(); ++i) {
    for (int j = 0; j < channels.ues(i); ++j) {
      const CVec path = compose_paths(channels, beamformers, {i, j}, bs);
      const double term = powers_mw[i][j] * std::norm(inner(combiner, path));
      if (i == target.cell && j == target.ue) {
        signal = term;
      } else {
        interference += term;
      }
    }
  }
  return signal / (interference + noise_mw);
}

double achievable_rate(double sinr) {
  if (sinr < 0.0) throw std::invalid_argument("achievable_rate: negative SINR");
  return std::log2(1.0 + sinr);
}

CVec received_signal(const ChannelSet& channels, const std::vector<IrsBeamformer>& beamformers,
                     const std::vector<std::vector<double>>& powers_mw,
                     const std::vector<std::vector<cdouble>>& symbols, const CVec& noise, int bs) {
  check_beamformers(channels, beamformers);
  CVec y = noise;
  for (int i = 0; i < channels.cells(); ++i) {
    for (int j = 0; j < channels.ues(i); ++j) {
      const CVec h = effective_channel(channels, beamformers, powers_mw[i][j], {i, j}, bs);
      add_inplace(y, scaled(h, symbols[i][j]));
    }
  }
  return y;
}

cdouble combine_received(const CVec& combiner, const CVec& received) {
  return inner(combiner, received);
}

}  // namespace irsim
