#include "irsim/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace irsim;

namespace {

SimConfig small_config(Scheme scheme, std::uint64_t seed = 1, long long slots = 25) {
  SimConfig c;
  c.cells = 2;
  c.ues_per_cell = 2;
  c.bs_antennas = 2;
  c.irs_elements = 2;
  c.rho = 0.99;
  c.power_levels = 6;
  c.combiner_codebook_size = 8;
  c.irs_codebook_size = 8;
  c.scheme = scheme;
  c.slots = slots;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("moving average") {
  CHECK(moving_average({}, 5).empty());
  CHECK(moving_average({2.0, 2.0, 2.0}, 4) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(moving_average({1.0, 5.0, 3.0}, 1) == std::vector<double>{1.0, 5.0, 3.0});
  const auto ma = moving_average({1.0, 2.0, 3.0}, 2);
  REQUIRE(ma.size() == 3);
  CHECK(ma[0] == doctest::Approx(1.0));
  CHECK(ma[1] == doctest::Approx(1.5));
  CHECK(ma[2] == doctest::Approx(2.5));
  CHECK_THROWS_AS(moving_average({1.0}, 0), std::invalid_argument);
}

TEST_CASE("baseline index selection rules") {
  const PowerSet p = build_power_set(10.0, 1000.0, 10);
  RngStream zs(7, "harntest/z");
  const Codebook z = build_combiner_codebook(3, 8, zs);
  RngStream qs(8, "harntest/q");
  const Codebook q = build_irs_codebook(3, 8, qs);
  RngStream stream(9, "harntest/baseline");

  NetworkVariables v;
  v.power_idx.assign(2, 0);
  v.combiner_idx.assign(2, 0);

  baseline_select_indices(Scheme::kMrr, v, p, z, q, stream);
  CHECK(v.power_idx == std::vector<int>{9, 9});
  CHECK_FALSE(v.irs_off);

  baseline_select_indices(Scheme::kFrm, v, p, z, q, stream);
  // 25% of 1000 mW = 250 mW; nearest grid point is index 6 (~215 mW, 23.3 dBm).
  CHECK(v.power_idx == std::vector<int>{6, 6});
  CHECK(nearest_power_index(p, 250.0) == 6);
  CHECK(linear_to_db(p.value_mw(6)) == doctest::Approx(23.333).epsilon(1e-3));

  baseline_select_indices(Scheme::kMmNoIrs, v, p, z, q, stream);
  CHECK(v.irs_off);
  for (std::size_t i = 0; i < v.phi.size(); ++i) CHECK(v.phi.phi()[i] == cdouble(0.0, 0.0));

  // Random kinds stay in range and eventually vary.
  bool varied = false;
  int first = -1;
  for (int i = 0; i < 50; ++i) {
    baseline_select_indices(Scheme::kRrr, v, p, z, q, stream);
    CHECK(v.power_idx[0] >= 0);
    CHECK(v.power_idx[0] < p.size());
    if (first < 0) first = v.power_idx[0];
    if (v.power_idx[0] != first) varied = true;
  }
  CHECK(varied);

  CHECK_THROWS_AS(baseline_select_indices(Scheme::kDqn1, v, p, z, q, stream),
                  std::invalid_argument);
}

TEST_CASE("MM-no-IRS effective channel equals the scaled direct channel") {
  RngStream t(12, "harntest/topo");
  const Topology topo = build_topology({2, 1, 3, 3, 100.0}, t);
  RngStream cs(13, "harntest/chan");
  const ChannelSet ch = init_channels(topo, PathLossParams{}, 0.99, cs);
  std::vector<IrsBeamformer> off{IrsBeamformer::off(3), IrsBeamformer::off(3)};
  const double pmax = 1000.0;
  const CVec h = effective_channel(ch, off, pmax, {0, 0}, 0);
  const CVec direct = scaled(ch.h_ue_bs(0, 0, 0), std::sqrt(pmax));
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == direct[i]);
}

TEST_CASE("run_scenario is deterministic per seed") {
  for (Scheme scheme : {Scheme::kDqn2, Scheme::kRrm}) {
    const RunResult a = run_scenario(small_config(scheme, 3));
    const RunResult b = run_scenario(small_config(scheme, 3));
    REQUIRE(a.ue_rows.size() == b.ue_rows.size());
    for (std::size_t i = 0; i < a.ue_rows.size(); ++i) {
      CHECK(a.ue_rows[i].sinr_db == b.ue_rows[i].sinr_db);
      CHECK(a.ue_rows[i].rate == b.ue_rows[i].rate);
      CHECK(a.ue_rows[i].power_idx == b.ue_rows[i].power_idx);
    }
    REQUIRE(a.bs_rows.size() == b.bs_rows.size());
    for (std::size_t i = 0; i < a.bs_rows.size(); ++i) {
      CHECK(a.bs_rows[i].reward == b.bs_rows[i].reward);
      CHECK(a.bs_rows[i].loss == b.bs_rows[i].loss);
    }
    CHECK(a.summary == b.summary);

    const RunResult c = run_scenario(small_config(scheme, 4));
    CHECK(a.summary["mean_rate_all_ue"] != c.summary["mean_rate_all_ue"]);
  }
}

TEST_CASE("record shape: rows per slot and internal consistency") {
  SimConfig cfg = small_config(Scheme::kMrm, 5, 10);
  cfg.cells = 3;
  cfg.ues_per_cell = 3;
  const RunResult r = run_scenario(cfg);
  CHECK(r.ue_rows.size() == 10u * 3u * 3u);
  CHECK(r.bs_rows.size() == 10u * 3u);

  // Per-cell rate sums equal reward + penalty_sum (Eq.-14 decomposition).
  for (const auto& bs : r.bs_rows) {
    double rate_sum = 0.0;
    for (const auto& ue : r.ue_rows) {
      if (ue.slot == bs.slot && ue.cell == bs.cell) rate_sum += ue.rate;
    }
    CHECK(bs.reward == doctest::Approx(rate_sum - bs.penalty_sum).epsilon(1e-12));
  }
}

TEST_CASE("horizon zero produces only headers") {
  const SimConfig cfg = small_config(Scheme::kRrr, 1, 0);
  const RunResult r = run_scenario(cfg);
  CHECK(r.ue_rows.empty());
  CHECK(r.bs_rows.empty());
  CHECK(r.summary["final_ma_rate"].get<double>() == 0.0);
}

TEST_CASE("config hash changes iff any field changes") {
  const SimConfig base = small_config(Scheme::kDqn2);
  CHECK(config_hash(base) == config_hash(small_config(Scheme::kDqn2)));
  auto changed = base;
  changed.seed = 99;
  CHECK(config_hash(changed) != config_hash(base));
  auto changed2 = base;
  changed2.agent.gamma = 0.69;
  CHECK(config_hash(changed2) != config_hash(base));
  auto changed3 = base;
  changed3.pmax_dbm = 29.0;
  CHECK(config_hash(changed3) != config_hash(base));
}

TEST_CASE("config json round-trip and validation") {
  SimConfig c = small_config(Scheme::kDqn3, 17);
  c.speed_kmh = 3.0;
  c.agent.huber_loss = true;
  const SimConfig back = SimConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.scheme == Scheme::kDqn3);
  CHECK(back.speed_kmh == 3.0);
  CHECK(back.agent.huber_loss);

  nlohmann::json bad = c.to_json();
  bad["channel"]["velocity"] = 3.0;
  CHECK_THROWS_AS(SimConfig::from_json(bad), ConfigError);
  CHECK_THROWS_AS(scheme_from_string("dqn4"), ConfigError);

  SimConfig invalid = c;
  invalid.b1 = 0;
  CHECK_THROWS_AS(validate_config(invalid), ConfigError);
  invalid = c;
  invalid.agent.pool_capacity = 5;
  invalid.agent.batch_size = 10;
  CHECK_THROWS_AS(validate_config(invalid), ConfigError);
}

TEST_CASE("speed_kmh drives rho through the Jakes model") {
  SimConfig c = small_config(Scheme::kRrr);
  c.speed_kmh = 1.0;
  CHECK(c.effective_rho() == doctest::Approx(0.998678).epsilon(1e-5));
  c.speed_kmh = -1.0;
  c.rho = 0.9;
  CHECK(c.effective_rho() == 0.9);
}

TEST_CASE("write_outputs emits the documented files and columns") {
  namespace fs = std::filesystem;
  SimConfig cfg = small_config(Scheme::kDqn2, 2, 5);
  cfg.out_dir = (fs::temp_directory_path() / "irsim_harness_test_out").string();
  cfg.dump_topology = true;
  cfg.dump_codebooks = true;
  fs::remove_all(cfg.out_dir);
  const RunResult r = run_scenario(cfg);
  write_outputs(r, cfg);

  std::ifstream ue(fs::path(cfg.out_dir) / "ue_records.csv");
  REQUIRE(ue.good());
  std::string header;
  std::getline(ue, header);
  CHECK(header == "slot,cell,ue,sinr_db,rate_bps_hz,power_idx,combiner_idx");
  int ue_lines = 0;
  for (std::string line; std::getline(ue, line);) ++ue_lines;
  CHECK(ue_lines == 5 * 2 * 2);

  std::ifstream bs(fs::path(cfg.out_dir) / "bs_records.csv");
  REQUIRE(bs.good());
  std::getline(bs, header);
  CHECK(header == "slot,cell,reward,penalty_sum,epsilon,loss,irs_idx");

  std::ifstream summary(fs::path(cfg.out_dir) / "summary.json");
  REQUIRE(summary.good());
  nlohmann::json j;
  summary >> j;
  for (const char* key :
       {"scheme", "slots", "final_ma_rate", "mean_rate_all_ue", "config_hash", "runtime_s"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["scheme"] == "dqn2");
  CHECK(j["runtime_s"].get<double>() == doctest::Approx(5 * cfg.slot_s));

  // Summary rate agrees with a re-aggregation of the rows.
  double acc = 0.0;
  for (const auto& row : r.ue_rows) acc += row.rate;
  acc /= static_cast<double>(r.ue_rows.size());
  CHECK(j["mean_rate_all_ue"].get<double>() == doctest::Approx(acc).epsilon(1e-9));

  CHECK(fs::exists(fs::path(cfg.out_dir) / "topology.json"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "codebooks.json"));
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("schemes run end to end without numerical failures") {
  for (Scheme scheme : {Scheme::kDqn1, Scheme::kDqn2, Scheme::kDqn3, Scheme::kRrr, Scheme::kMrr,
                        Scheme::kMrm, Scheme::kFrm, Scheme::kRrm, Scheme::kMmNoIrs}) {
    const SimConfig cfg = small_config(scheme, 6, 60);
    const RunResult r = run_scenario(cfg);
    CHECK(r.ue_rows.size() == 60u * 2u * 2u);
    for (const auto& row : r.ue_rows) {
      CHECK(std::isfinite(row.rate));
      CHECK(row.rate >= 0.0);
    }
    if (scheme == Scheme::kMmNoIrs) {
      for (const auto& row : r.bs_rows) CHECK(row.irs_idx == -1);
    }
  }
}
