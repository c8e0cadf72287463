#include "irsim/codebook.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irsim {

PowerSet build_power_set(double pmin_mw, double pmax_mw, int size) {
  if (!(pmin_mw > 0.0) || !(pmax_mw > pmin_mw)) {
    throw std::invalid_argument("build_power_set: need 0 < p_min < p_max");
  }
  if (size < 2) throw std::invalid_argument("build_power_set: size must be >= 2");
  const double step = (std::log(pmax_mw) - std::log(pmin_mw)) / (size - 1);
  std::vector<double> values(size);
  for (int i = 0; i < size; ++i) values[i] = pmin_mw * std::exp(i * step);
  values.front() = pmin_mw;
  values.back() = pmax_mw;
  return PowerSet(std::move(values));
}

Codebook build_combiner_codebook(int antennas, int size, RngStream& stream) {
  if (antennas < 1 || size < 1) {
    throw std::invalid_argument("build_combiner_codebook: counts must be >= 1");
  }
  std::vector<CVec> words;
  words.reserve(size);
  for (int i = 0; i < size; ++i) {
    CVec w = complex_gaussian(antennas, stream);
    words.push_back(scaled(w, 1.0 / norm2(w)));
  }
  return Codebook(CodebookKind::kCombiner, std::move(words));
}

Codebook build_irs_codebook(int elements, int size, RngStream& stream) {
  if (elements < 1 || size < 1) {
    throw std::invalid_argument("build_irs_codebook: counts must be >= 1");
  }
  std::vector<CVec> words;
  words.reserve(size);
  for (int i = 0; i < size; ++i) {
    CVec w(elements);
    for (int n = 0; n < elements; ++n) {
      const double theta = 2.0 * std::numbers::pi * stream.uniform01();
      w[n] = {std::cos(theta), std::sin(theta)};
    }
    words.push_back(std::move(w));
  }
  return Codebook(CodebookKind::kIrs, std::move(words));
}

int mrc_select(const Codebook& codebook, const CVec& h) {
  if (codebook.size() == 0) throw std::invalid_argument("mrc_select: empty codebook");
  if (codebook.kind() != CodebookKind::kCombiner) {
    throw std::invalid_argument("mrc_select: expects a combiner codebook");
  }
  int best = 0;
  double best_score = -1.0;
  for (int i = 0; i < codebook.size(); ++i) {
    const double score = std::norm(inner(codebook.word(i), h));
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

}  // namespace irsim
