#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "ctables/error.hpp"
#include "ctables/phase.hpp"
#include "oracles.hpp"

using namespace ctables;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double worst_error(const ScanRow& r) {
  return std::max({r.errZ111, r.errZ121, r.errZ221, r.errZ222});
}

}  // namespace

TEST_SUITE("phase") {

TEST_CASE("closed-form limits") {
  const double Bc = 1.0 / (std::cbrt(4.0) - 1.0);
  const auto sub = theorem_limits_3way(1.2);
  CHECK(sub.regime == Regime::Subcritical);
  CHECK_FALSE(sub.z111_is_slope);
  const double r = (1.0 / 1.2 + 1.0) / (1.0 / Bc + 1.0);
  CHECK(rel(sub.z111, 1.0 / (r * r * r - 1.0)) < 1e-14);
  CHECK(rel(sub.z121, 1.0 / (std::cbrt(2.0) * r * r - 1.0)) < 1e-14);
  CHECK(rel(sub.z221, 1.0 / (std::cbrt(4.0) * r - 1.0)) < 1e-14);
  CHECK(sub.z222 == 1.0);
  CHECK(std::abs(sub.z111 - 1.850) < 1e-3);
  CHECK(std::abs(sub.z121 - 1.469) < 1e-3);
  CHECK(std::abs(sub.z221 - 1.200) < 1e-3);

  const auto sup = theorem_limits_3way(2.5);
  CHECK(sup.regime == Regime::Supercritical);
  CHECK(sup.z111_is_slope);
  CHECK(std::abs(sup.z111 - 0.79759) < 1e-5);
  CHECK(std::abs(sup.z121 - 3.84732) < 1e-5);
  CHECK(std::abs(sup.z221 - 1.70241) < 1e-5);
  // the two branches agree at the threshold
  const auto at = theorem_limits_3way(Bc);
  CHECK(std::abs(at.z121 - sup.z121) < 1e-9);
  CHECK(std::abs(at.z221 - sup.z221) < 1e-9);
}

TEST_CASE("scan errors decay like 1/n") {
  Scan3wayConfig config{{1.1, 1.2, 1.4, 2.5}, {50, 100, 200, 400, 800}, 1e-10, 2};
  const auto rows = scan_3way(config);
  REQUIRE(rows.size() == 20);
  for (double B : config.B) {
    double lo = INFINITY, hi = 0;
    double prev = INFINITY;
    for (const auto& r : rows) {
      if (r.B != B) continue;
      CHECK(r.converged);
      const double scaled = worst_error(r) * static_cast<double>(r.n);
      lo = std::min(lo, scaled), hi = std::max(hi, scaled);
      // each doubling of n roughly halves the error
      if (std::isfinite(prev)) CHECK(std::abs(worst_error(r) / prev - 0.5) < 0.15);
      prev = worst_error(r);
    }
    CHECK(hi <= 3.0 * lo);
  }
}

TEST_CASE("scan invariants") {
  Scan3wayConfig config{{2.5, 1.0, 1.2}, {400, 50, 100, 50}, 1e-10, 3};
  const auto rows = scan_3way(config);
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::make_pair(rows[i - 1].n, rows[i - 1].B) < std::make_pair(rows[i].n, rows[i].B));
  for (const auto& r : rows) {
    CHECK(std::abs(r.Q * r.Q * r.Q - 2.0) <= 10.0 / static_cast<double>(r.n));
    // recompute the margin equations from P - 1 and Q - 1
    const auto lhs = barvinok_lhs(r.n, r.P - 1.0, r.Q - 1.0);
    const double n2 = static_cast<double>(r.n * r.n);
    CHECK(rel(lhs.heavy, r.B * n2) < 1e-8);
    CHECK(rel(lhs.light, n2) < 1e-8);
    CHECK(r.residual <= 1e-10);
    const auto lim = theorem_limits_3way(r.B);
    CHECK(r.limitZ121 == lim.z121);
    CHECK(r.limitZ111 == lim.z111);
  }
  // thread count does not change the output
  config.threads = 1;
  const auto serial = scan_3way_csv(scan_3way(config));
  config.threads = 4;
  CHECK(scan_3way_csv(scan_3way(config)) == serial);
  CHECK(serial.rfind(scan_3way_header(), 0) == 0);
}

TEST_CASE("manifest replay reproduces the CSV") {
  const Scan3wayConfig config{{1.2, 2.5}, {50, 100}, 1e-10, 2};
  const auto csv = scan_3way_csv(scan_3way(config));
  RunManifest m{"barvinok-scan", to_json(config), {}, kToolVersion, "2026-01-01T00:00:00Z"};
  const auto round_trip = manifest_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(round_trip.command == m.command);
  CHECK(replay_manifest(round_trip) == csv);

  const Scan2wayConfig two{1.0, {1.5, 3.0}, {16}, 0.6, true, 1e-10, 1};
  RunManifest m2{"scan-2way", to_json(two), {}, kToolVersion, ""};
  CHECK(replay_manifest(manifest_from_json(to_json(m2))) == scan_2way_csv(scan_2way(two)));
  CHECK_THROWS_AS(replay_manifest(RunManifest{"sample", {}, {}, kToolVersion, ""}), Error);
}

TEST_CASE("two-valued 2-way margins") {
  const auto m = two_way_margins(64, 0.6, 3.0, 1.0, true);
  CHECK(m.bezel == 12);
  CHECK(m.bezel_margin == 192);
  CHECK(m.bulk_margin == 64);
  CHECK(m.adjustment == 0);
  CHECK(m.rows.size() == 76);
  CHECK(m.rows == m.cols);
  const auto light = two_way_margins(64, 0.6, 3.0, 1.0, false);
  CHECK(light.bezel_margin == 64);
  CHECK(light.bulk_margin == 192);
  CHECK_THROWS_AS(two_way_margins(64, 0.6, 3.0, 0.001, true), Error);
  CHECK_THROWS_AS(two_way_margins(64, 1.5, 3.0, 1.0, true), Error);
  CHECK(rel(critical_ratio_2way(1.0), 2.41421356) < 1e-8);
}

TEST_CASE("2-way corner: bounded below the threshold, growing above it") {
  const Scan2wayConfig config{1.0, {1.5, 2.0, 3.0, 4.0}, {32, 64, 128}, 0.6, true, 1e-10, 2};
  const auto rows = scan_2way(config);
  REQUIRE(rows.size() == 12);
  std::map<double, std::vector<double>> corner;
  for (const auto& r : rows) {
    CHECK(r.converged);
    const auto m = two_way_margins(r.n, r.delta, r.B, r.C, true);
    const double expect = oracle::two_class_corner(m.bezel, r.n, static_cast<double>(m.bezel_margin),
                                                   static_cast<double>(m.bulk_margin));
    CHECK(rel(r.corner, expect) < 1e-8);
    corner[r.B].push_back(r.corner);
  }
  auto growth = [&](double B) { return corner[B].back() / corner[B].front(); };
  CHECK(growth(1.5) < 1.25);
  CHECK(growth(2.0) < 1.25);
  CHECK(growth(3.0) > 1.3);
  CHECK(growth(4.0) > 1.3);
  for (double B : {3.0, 4.0}) {
    // increments widen with n
    CHECK(corner[B][2] - corner[B][1] > corner[B][1] - corner[B][0]);
  }
}

TEST_CASE("light bezel keeps the corner below one") {
  const Scan2wayConfig config{1.0, {1.5, 4.0}, {32, 64}, 0.6, false, 1e-10, 1};
  for (const auto& r : scan_2way(config)) {
    CHECK(r.converged);
    CHECK(r.corner < 1.0);
    CHECK(r.bulk > 1.0);
  }
}

TEST_CASE("fiber experiment report") {
  FiberExperimentConfig config;
  config.spec = {{{2, 1}, {2, 1}}};
  config.steps = 40000;
  config.burn_in = 1000;
  config.seed = 4;
  const auto report = fiber_experiment(config);
  CHECK(report["enumerable"].get<bool>());
  CHECK(report["fiber_size"].get<std::size_t>() == 2);
  CHECK(std::abs(report["uniform_vs_hypergeometric_tv"].get<double>() - 1.0 / 6.0) < 1e-14);
  CHECK(report["connected"].get<bool>());
  for (const char* law : {"uniform", "hypergeometric"}) {
    const auto& chain = report["chains"][law];
    CHECK(chain["kept"].get<std::uint64_t>() == 39000);
    CHECK(chain["tv_to_exact"].get<double>() < 0.03);
  }
  config.budget = 1;
  const auto big = fiber_experiment(config);
  CHECK_FALSE(big["enumerable"].get<bool>());
  CHECK_FALSE(big.contains("fiber_size"));
}

}  // TEST_SUITE
