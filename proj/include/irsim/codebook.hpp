#pragma once

#include <vector>

#include "irsim/numerics.hpp"

namespace irsim {

/// Ordered set of linear transmit powers (mW), geometrically spaced from
/// p_min to p_max.
class PowerSet {
 public:
  PowerSet() = default;
  explicit PowerSet(std::vector<double> values_mw) : values_(std::move(values_mw)) {}

  int size() const { return static_cast<int>(values_.size()); }
  double value_mw(int i) const { return values_[i]; }
  const std::vector<double>& values_mw() const { return values_; }

 private:
  std::vector<double> values_;
};

PowerSet build_power_set(double pmin_mw, double pmax_mw, int size);

enum class CodebookKind { kCombiner, kIrs };

/// Ordered list of codewords. Combiner codewords have unit l2 norm; IRS
/// codewords have unit-modulus entries.
class Codebook {
 public:
  Codebook() = default;
  Codebook(CodebookKind kind, std::vector<CVec> words) : kind_(kind), words_(std::move(words)) {}

  CodebookKind kind() const { return kind_; }
  int size() const { return static_cast<int>(words_.size()); }
  std::size_t dim() const { return words_.empty() ? 0 : words_[0].size(); }
  const CVec& word(int i) const { return words_[i]; }

 private:
  CodebookKind kind_ = CodebookKind::kCombiner;
  std::vector<CVec> words_;
};

/// RVQ combiner codebook: normalized complex Gaussian vectors.
Codebook build_combiner_codebook(int antennas, int size, RngStream& stream);

/// RVQ reflect-beamformer codebook: entries e^{j 2 pi theta}, theta uniform.
Codebook build_irs_codebook(int elements, int size, RngStream& stream);

/// Maximum ratio combining: smallest index maximizing |Z(i)^H h|^2.
int mrc_select(const Codebook& codebook, const CVec& h);

}  // namespace irsim
