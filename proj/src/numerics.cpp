#include "irsim/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irsim {

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": size mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

CVec add(const CVec& u, const CVec& v) {
  check_same_size(u.size(), v.size(), "add");
  CVec out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
  return out;
}

void add_inplace(CVec& u, const CVec& v) {
  check_same_size(u.size(), v.size(), "add_inplace");
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i];
}

CVec scaled(const CVec& v, cdouble c) {
  CVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

CVec scaled(const CVec& v, double c) { return scaled(v, cdouble(c, 0.0)); }

CVec hadamard(const CVec& a, const CVec& b) {
  check_same_size(a.size(), b.size(), "hadamard");
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

cdouble inner(const CVec& u, const CVec& v) {
  check_same_size(u.size(), v.size(), "inner");
  cdouble s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

double norm2(const CVec& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(v[i]);
  return std::sqrt(s);
}

CVec matvec(const CMat& a, const CVec& x) {
  check_same_size(a.cols(), x.size(), "matvec");
  CVec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cdouble s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

RngStream::RngStream(std::uint64_t global_seed, std::string_view name)
    : state_(mix64(global_seed ^ (fnv1a64(name) * kSplitmixGamma))) {}

std::uint64_t RngStream::next_u64() {
  state_ += kSplitmixGamma;
  return mix64(state_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
}

cdouble RngStream::standard_complex_gaussian() {
  // Box-Muller; u1 on (0,1] keeps log finite.
  double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform01();
  double r = std::sqrt(-std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

CVec complex_gaussian(std::size_t n, RngStream& stream) {
  if (n == 0) throw std::invalid_argument("complex_gaussian: n must be >= 1");
  CVec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = stream.standard_complex_gaussian();
  return out;
}

namespace {

// Alternating power series sum_k (-1)^k (x^2/4)^k / (k!)^2 with compensated
// summation; cancellation stays below 1e-12 absolute for |x| < 12.
double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (int k = 1; k <= 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

// Hankel expansion J0(x) = sqrt(2/(pi x)) (P cos w - Q sin w), w = x - pi/4,
// truncated at the smallest term. For x >= 12 the smallest term is below
// 1e-12 of the result.
double j0_asymptotic(double x) {
  const double inv = 1.0 / x;
  double p_sum = 0.0;
  double q_sum = 0.0;
  double coeff = 1.0;  // ((2m-1)!!)^2 / (m! 8^m)
  double xp = 1.0;     // x^-m
  double prev = std::numeric_limits<double>::infinity();
  double sign_p = 1.0;
  double sign_q = -1.0;
  for (int m = 0; m <= 60; ++m) {
    const double term = coeff * xp;
    if (term >= prev) break;
    if (m % 2 == 0) {
      p_sum += sign_p * term;
      sign_p = -sign_p;
    } else {
      q_sum += sign_q * term;
      sign_q = -sign_q;
    }
    prev = term;
    if (term < 1e-18) break;
    const double mm = static_cast<double>(m + 1);
    coeff *= (2.0 * mm - 1.0) * (2.0 * mm - 1.0) / (8.0 * mm);
    xp *= inv;
  }
  const double w = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p_sum * std::cos(w) - q_sum * std::sin(w));
}

}  // namespace

double bessel_j0(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j0: non-finite argument");
  const double ax = std::abs(x);
  return ax < 12.0 ? j0_series(ax) : j0_asymptotic(ax);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double v) {
  if (!(v > 0.0)) throw std::domain_error("linear_to_db: value must be positive");
  return 10.0 * std::log10(v);
}

}  // namespace irsim
