#include "irsim/signal.hpp"

#include <cmath>

#include "doctest.h"

using namespace irsim;

namespace {

struct Fixture {
  Topology topo;
  ChannelSet channels;
  Fixture(int cells, int ues, int m, int n, std::uint64_t seed) {
    RngStream t(seed, "sigtest/topo");
    topo = build_topology({cells, ues, m, n, 100.0}, t);
    RngStream c(seed, "sigtest/chan");
    channels = init_channels(topo, PathLossParams{}, 0.99, c);
  }
};

std::vector<IrsBeamformer> random_beamformers(const ChannelSet& ch, RngStream& stream) {
  std::vector<IrsBeamformer> phis;
  for (int r = 0; r < ch.cells(); ++r) {
    const int n = static_cast<int>(ch.h_ue_irs(0, 0, r).size());
    CVec phi(n);
    for (int i = 0; i < n; ++i) {
      const double theta = 2.0 * 3.14159265358979323846 * stream.uniform01();
      phi[i] = {std::cos(theta), std::sin(theta)};
    }
    phis.emplace_back(std::move(phi));
  }
  return phis;
}

// Independent path enumeration for R = 2: the five propagation paths are
// expanded entry-by-entry with raw index loops, no shared vector helpers.
CVec oracle_effective_r2(const ChannelSet& ch, const std::vector<IrsBeamformer>& phis,
                         double p, UeRef ue, int bs) {
  const CVec& direct = ch.h_ue_bs(ue.cell, ue.ue, bs);
  const std::size_t m = direct.size();
  std::vector<cdouble> acc(m);
  for (std::size_t a = 0; a < m; ++a) acc[a] = direct[a];
  // Single reflections.
  for (int r = 0; r < 2; ++r) {
    const CVec& hui = ch.h_ue_irs(ue.cell, ue.ue, r);
    const CMat& gib = ch.g_irs_bs(r, bs);
    for (std::size_t a = 0; a < m; ++a) {
      cdouble s = 0.0;
      for (std::size_t n = 0; n < hui.size(); ++n) {
        s += gib(a, n) * phis[r].phi()[n] * hui[n];
      }
      acc[a] += s;
    }
  }
  // Double reflections 0->1 and 1->0.
  for (int r1 = 0; r1 < 2; ++r1) {
    const int r2 = 1 - r1;
    const CVec& hui = ch.h_ue_irs(ue.cell, ue.ue, r1);
    const CMat& gii = ch.g_irs_irs(r1, r2);
    const CMat& gib = ch.g_irs_bs(r2, bs);
    for (std::size_t a = 0; a < m; ++a) {
      cdouble s = 0.0;
      for (std::size_t n2 = 0; n2 < gii.rows(); ++n2) {
        cdouble inner_sum = 0.0;
        for (std::size_t n1 = 0; n1 < gii.cols(); ++n1) {
          inner_sum += gii(n2, n1) * phis[r1].phi()[n1] * hui[n1];
        }
        s += gib(a, n2) * phis[r2].phi()[n2] * inner_sum;
      }
      acc[a] += s;
    }
  }
  CVec out(m);
  for (std::size_t a = 0; a < m; ++a) out[a] = std::sqrt(p) * acc[a];
  return out;
}

}  // namespace

TEST_CASE("IRS beamformer entry modulus is bounded by 1") {
  CHECK_NOTHROW(IrsBeamformer(CVec{cdouble(1.0, 0.0), cdouble(0.0, -1.0)}));
  CHECK_NOTHROW(IrsBeamformer(CVec{cdouble(0.5, 0.0)}));
  CHECK_THROWS_AS(IrsBeamformer(CVec{cdouble(1.5, 0.0)}), std::invalid_argument);
  const IrsBeamformer off = IrsBeamformer::off(4);
  for (std::size_t i = 0; i < off.size(); ++i) CHECK(off.phi()[i] == cdouble(0.0, 0.0));
}

TEST_CASE("effective channel: zero beamformers collapse to the direct path") {
  Fixture f(2, 1, 3, 3, 101);
  std::vector<IrsBeamformer> off{IrsBeamformer::off(3), IrsBeamformer::off(3)};
  const double p = 100.0;
  const CVec h = effective_channel(f.channels, off, p, {0, 0}, 1);
  const CVec expect = scaled(f.channels.h_ue_bs(0, 0, 1), std::sqrt(p));
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h[i] - expect[i]) < 1e-15);

  const CVec zero = effective_channel(f.channels, off, 0.0, {0, 0}, 1);
  for (std::size_t i = 0; i < zero.size(); ++i) CHECK(zero[i] == cdouble(0.0, 0.0));
}

TEST_CASE("effective channel matches the independent path enumeration") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Fixture f(2, 1, 3, 3, seed);
    RngStream ps(seed, "sigtest/phi");
    const auto phis = random_beamformers(f.channels, ps);
    const double p = 10.0 + 5.0 * static_cast<double>(seed % 7);
    for (int bs = 0; bs < 2; ++bs) {
      const CVec got = effective_channel(f.channels, phis, p, {1, 0}, bs);
      const CVec want = oracle_effective_r2(f.channels, phis, p, {1, 0}, bs);
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i] - want[i]) <= 1e-12 * std::abs(want[i]));
      }
    }
  }
}

TEST_CASE("effective channel scales as sqrt(p)") {
  Fixture f(2, 1, 3, 3, 55);
  RngStream ps(5, "sigtest/phi2");
  const auto phis = random_beamformers(f.channels, ps);
  const CVec h1 = effective_channel(f.channels, phis, 1.0, {0, 0}, 0);
  const CVec h2 = effective_channel(f.channels, phis, 2.0, {0, 0}, 0);
  for (std::size_t i = 0; i < h1.size(); ++i) {
    CHECK(std::abs(h2[i] - std::sqrt(2.0) * h1[i]) < 1e-14 * std::abs(h1[i]) + 1e-300);
  }
}

TEST_CASE("scalar effective power") {
  RngStream stream(7, "sigtest/scalar");
  const CVec h = complex_gaussian(5, stream);
  const CVec z_aligned = scaled(h, 1.0 / norm2(h));
  CHECK(scalar_effective_power(z_aligned, h) ==
        doctest::Approx(norm2(h) * norm2(h)).epsilon(1e-12));

  // Orthogonal combiner: Gram-Schmidt one vector against h.
  CVec g = complex_gaussian(5, stream);
  const cdouble proj = inner(h, g) / (norm2(h) * norm2(h));
  CVec orth = add(g, scaled(h, -proj));
  CHECK(scalar_effective_power(orth, h) < 1e-20 * norm2(h) * norm2(h) * norm2(orth) * norm2(orth) + 1e-18);

  // Explicit sum expansion.
  const CVec z = complex_gaussian(5, stream);
  cdouble s = 0.0;
  for (int i = 0; i < 5; ++i) s += std::conj(z[i]) * h[i];
  CHECK(scalar_effective_power(z, h) == doctest::Approx(std::norm(s)).epsilon(1e-12));

  CHECK_THROWS_AS(scalar_effective_power(CVec(3), CVec(5)), std::invalid_argument);
}

TEST_CASE("achievable rate") {
  CHECK(achievable_rate(0.0) == 0.0);
  CHECK(achievable_rate(1.0) == doctest::Approx(1.0));
  CHECK(achievable_rate(3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(achievable_rate(-0.1), std::invalid_argument);
  // Monotone increasing and concave on a grid.
  double prev = achievable_rate(0.0);
  double prev_diff = -1.0;
  bool first = true;
  for (double s = 0.25; s <= 20.0; s += 0.25) {
    const double cur = achievable_rate(s);
    CHECK(cur > prev);
    const double diff = cur - prev;
    if (!first) CHECK(diff < prev_diff + 1e-12);
    prev_diff = diff;
    prev = cur;
    first = false;
  }
}

TEST_CASE("sinr trivial cases") {
  const double noise = 4.0e-12;
  std::vector<std::vector<double>> scalars{{noise}};
  CHECK(sinr_from_scalars({0, 0}, scalars, noise) == doctest::Approx(1.0));
  CHECK(achievable_rate(sinr_from_scalars({0, 0}, scalars, noise)) == doctest::Approx(1.0));

  std::vector<std::vector<double>> with_idle{{8.0 * noise, 0.0}, {0.0, 0.0}};
  CHECK(sinr_from_scalars({0, 0}, with_idle, noise) == doctest::Approx(8.0));

  CHECK_THROWS_AS(sinr_from_scalars({2, 0}, scalars, noise), std::invalid_argument);
  CHECK_THROWS_AS(sinr_from_scalars({0, 0}, scalars, 0.0), std::invalid_argument);
}

TEST_CASE("sinr_from_scalars agrees with sinr_direct") {
  const double noise = db_to_linear(-114.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Fixture f(2, 2, 3, 3, 1000 + seed);
    RngStream ps(seed, "sigtest/phi3");
    const auto phis = random_beamformers(f.channels, ps);
    RngStream pw(seed, "sigtest/powers");
    std::vector<std::vector<double>> powers(2, std::vector<double>(2));
    for (auto& row : powers) {
      for (double& v : row) v = 10.0 + 990.0 * pw.uniform01();
    }
    RngStream zs(seed, "sigtest/z");
    CVec z = complex_gaussian(3, zs);
    z = scaled(z, 1.0 / norm2(z));

    const UeRef target{0, 1};
    const int bs = 0;
    std::vector<std::vector<double>> scalars(2, std::vector<double>(2));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const CVec h = effective_channel(f.channels, phis, powers[i][j], {i, j}, bs);
        scalars[i][j] = scalar_effective_power(z, h);
      }
    }
    const double via_scalars = sinr_from_scalars(target, scalars, noise);
    const double direct = sinr_direct(f.channels, phis, powers, z, target, bs, noise);
    CHECK(std::abs(via_scalars - direct) <= 1e-9 * direct);
  }
}

TEST_CASE("sinr_direct: zero powers and power/noise homogeneity") {
  Fixture f(2, 2, 3, 3, 77);
  RngStream ps(3, "sigtest/phi4");
  const auto phis = random_beamformers(f.channels, ps);
  RngStream zs(4, "sigtest/z2");
  CVec z = complex_gaussian(3, zs);
  z = scaled(z, 1.0 / norm2(z));
  const double noise = db_to_linear(-114.0);

  std::vector<std::vector<double>> zeros(2, std::vector<double>(2, 0.0));
  CHECK(sinr_direct(f.channels, phis, zeros, z, {0, 0}, 0, noise) == 0.0);

  std::vector<std::vector<double>> powers{{100.0, 250.0}, {31.6, 1000.0}};
  const double base = sinr_direct(f.channels, phis, powers, z, {1, 1}, 1, noise);
  const double c = 7.5;
  std::vector<std::vector<double>> scaled_powers = powers;
  for (auto& row : scaled_powers) {
    for (double& v : row) v *= c;
  }
  const double scaled_sinr =
      sinr_direct(f.channels, phis, scaled_powers, z, {1, 1}, 1, c * noise);
  CHECK(scaled_sinr == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("received signal: noise-free single UE reproduces the scalar power") {
  Fixture f(1, 1, 4, 3, 13);
  RngStream ps(6, "sigtest/phi5");
  const auto phis = random_beamformers(f.channels, ps);
  const double p = 316.0;
  std::vector<std::vector<double>> powers{{p}};
  const cdouble symbol(std::sqrt(0.5), std::sqrt(0.5));  // QPSK point
  std::vector<std::vector<cdouble>> symbols{{symbol}};
  RngStream zs(8, "sigtest/z3");
  CVec z = complex_gaussian(4, zs);
  z = scaled(z, 1.0 / norm2(z));

  const CVec y = received_signal(f.channels, phis, powers, symbols, CVec(4), 0);
  const cdouble combined = combine_received(z, y);
  const CVec h = effective_channel(f.channels, phis, p, {0, 0}, 0);
  CHECK(std::norm(combined) == doctest::Approx(scalar_effective_power(z, h)).epsilon(1e-12));
}

TEST_CASE("received signal Monte Carlo matches analytic SINR and noise floor") {
  const double noise = db_to_linear(-114.0);
  Fixture f(2, 2, 3, 3, 99);
  RngStream ps(9, "sigtest/phi6");
  const auto phis = random_beamformers(f.channels, ps);
  std::vector<std::vector<double>> powers{{100.0, 1000.0}, {500.0, 50.0}};
  RngStream zs(10, "sigtest/z4");
  CVec z = complex_gaussian(3, zs);
  z = scaled(z, 1.0 / norm2(z));
  const UeRef target{0, 0};
  const int bs = 0;

  RngStream mc(11, "sigtest/mc");
  const int draws = 100000;
  double signal_power = 0.0;
  double rest_power = 0.0;
  double noise_only_power = 0.0;
  const CVec h_target = effective_channel(f.channels, phis, powers[0][0], target, bs);
  for (int d = 0; d < draws; ++d) {
    std::vector<std::vector<cdouble>> symbols(2, std::vector<cdouble>(2));
    for (auto& row : symbols) {
      for (auto& s : row) {
        const int q = static_cast<int>(mc.uniform_index(4));
        const double re = (q & 1) ? std::sqrt(0.5) : -std::sqrt(0.5);
        const double im = (q & 2) ? std::sqrt(0.5) : -std::sqrt(0.5);
        s = {re, im};
      }
    }
    CVec n = complex_gaussian(3, mc);
    n = scaled(n, std::sqrt(noise));
    const CVec y = received_signal(f.channels, phis, powers, symbols, n, bs);
    const cdouble combined = combine_received(z, y);
    const cdouble sig = inner(z, h_target) * symbols[0][0];
    signal_power += std::norm(sig);
    rest_power += std::norm(combined - sig);

    std::vector<std::vector<cdouble>> silent(2, std::vector<cdouble>(2, 0.0));
    if (d < 20000) {
      CVec n2 = complex_gaussian(3, mc);
      n2 = scaled(n2, std::sqrt(noise));
      const CVec y2 = received_signal(f.channels, phis, powers, silent, n2, bs);
      noise_only_power += std::norm(combine_received(z, y2));
    }
  }
  const double empirical = (signal_power / draws) / (rest_power / draws);
  const double analytic = sinr_direct(f.channels, phis, powers, z, target, bs, noise);
  CHECK(empirical == doctest::Approx(analytic).epsilon(0.03));
  CHECK(noise_only_power / 20000 == doctest::Approx(noise).epsilon(0.03));
}
