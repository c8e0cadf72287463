#pragma once

#include <vector>

#include "irsim/channel.hpp"
#include "irsim/numerics.hpp"

namespace irsim {

/// Passive reflect beamformer phi of one IRS, applied as diag(phi).
/// Entry moduli may not exceed 1 (reflection cannot amplify).
class IrsBeamformer {
 public:
  IrsBeamformer() = default;
  explicit IrsBeamformer(CVec phi);
  /// All-zero beamformer of length n (IRS turned off).
  static IrsBeamformer off(std::size_t n) { return IrsBeamformer(CVec(n), kUnchecked); }

  const CVec& phi() const { return phi_; }
  std::size_t size() const { return phi_.size(); }

 private:
  struct Unchecked {};
  static constexpr Unchecked kUnchecked{};
  IrsBeamformer(CVec phi, Unchecked) : phi_(std::move(phi)) {}
  CVec phi_;
};

struct UeRef {
  int cell = 0;
  int ue = 0;
};

/// Effective UE->BS channel: sqrt(p) times the direct path plus all
/// single and double IRS reflections (the double sum skips same-IRS
/// bounces). One beamformer per IRS, lengths matching the element counts.
CVec effective_channel(const ChannelSet& channels, const std::vector<IrsBeamformer>& beamformers,
                       double power_mw, UeRef ue, int bs);

/// |z^H h|^2.
double scalar_effective_power(const CVec& combiner, const CVec& effective);

/// SINR of `target` from the scalar effective powers measured at its BS
/// with the target's combiner: scalars[cell][ue] = |h_hat_(i,j),l,k|^2.
/// Valid when the combiner has unit norm (noise power stays sigma^2).
double sinr_from_scalars(UeRef target, const std::vector<std::vector<double>>& scalars,
                         double noise_mw);

/// SINR evaluated directly from the channel matrices (the full-form
/// expression with direct, single- and double-reflection terms composed
/// inline). powers_mw[cell][ue]; combiner must have unit norm.
double sinr_direct(const ChannelSet& channels, const std::vector<IrsBeamformer>& beamformers,
                   const std::vector<std::vector<double>>& powers_mw, const CVec& combiner,
                   UeRef target, int bs, double noise_mw);

/// log2(1 + sinr), bits/s/Hz.
double achievable_rate(double sinr);

/// Received vector at one BS for given unit-mean-square symbols and a
/// noise draw: y = sum_(i,j) h_hat_(i,j) s_(i,j) + n.
CVec received_signal(const ChannelSet& channels, const std::vector<IrsBeamformer>& beamformers,
                     const std::vector<std::vector<double>>& powers_mw,
                     const std::vector<std::vector<cdouble>>& symbols, const CVec& noise, int bs);

/// y_hat = z^H y.
cdouble combine_received(const CVec& combiner, const CVec& received);

}  // namespace irsim
