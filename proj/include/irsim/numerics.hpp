#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace irsim {

using cdouble = std::complex<double>;

/// Dense complex vector. Dimensions are explicit; every operation that
/// combines two objects checks them and throws std::invalid_argument on
/// mismatch. No implicit broadcasting anywhere.
class CVec {
 public:
  CVec() = default;
  explicit CVec(std::size_t n) : v_(n) {}
  CVec(std::initializer_list<cdouble> init) : v_(init) {}
  explicit CVec(std::vector<cdouble> v) : v_(std::move(v)) {}

  std::size_t size() const { return v_.size(); }
  cdouble& operator[](std::size_t i) { return v_[i]; }
  const cdouble& operator[](std::size_t i) const { return v_[i]; }
  const std::vector<cdouble>& data() const { return v_; }

  bool operator==(const CVec& other) const = default;

 private:
  std::vector<cdouble> v_;
};

/// Dense complex matrix, row-major.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cdouble& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cdouble& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<cdouble>& data() const { return a_; }

  bool operator==(const CMat& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> a_;
};

CVec add(const CVec& u, const CVec& v);
void add_inplace(CVec& u, const CVec& v);
CVec scaled(const CVec& v, cdouble c);
CVec scaled(const CVec& v, double c);
/// Elementwise product a .* b (used for applying diag(phi) to a vector).
CVec hadamard(const CVec& a, const CVec& b);
/// Hermitian inner product <u,v> = u^H v.
cdouble inner(const CVec& u, const CVec& v);
/// Euclidean norm.
double norm2(const CVec& v);
/// y = A x.
CVec matvec(const CMat& a, const CVec& x);

/// Named, seedable pseudo-random stream. The state is a 64-bit counter
/// advanced by a fixed increment and finalized per draw (splitmix64), so
/// streams derived from distinct (seed, name) pairs are independent and a
/// stream's output depends only on its own call sequence. Single-owner:
/// each stream belongs to exactly one logical entity.
class RngStream {
 public:
  RngStream(std::uint64_t global_seed, std::string_view name);
  explicit RngStream(std::uint64_t raw_state) : state_(raw_state) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01();
  /// Uniform integer on [0, n). Requires n >= 1.
  std::size_t uniform_index(std::size_t n);
  /// One CN(0, 1) sample: real and imaginary parts each N(0, 1/2).
  cdouble standard_complex_gaussian();

 private:
  std::uint64_t state_ = 0;
};

/// n i.i.d. CN(0, 1) samples (per-entry variance 1). Requires n >= 1.
CVec complex_gaussian(std::size_t n, RngStream& stream);

/// Bessel function of the first kind, order zero, to <= 1e-12 absolute
/// error. Power series below |x| = 12, Hankel asymptotic expansion above.
double bessel_j0(double x);

/// 10^(db/10). Also converts dBm to mW.
double db_to_linear(double db);
/// 10 log10(v). Throws std::domain_error for v <= 0.
double linear_to_db(double v);

}  // namespace irsim
