#pragma once

// Experiment drivers: Barvinok-margin scans of the 3-way expected table
// against the closed-form limits, the 2-way typical-table threshold scan,
// and fiber sampling experiments.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctables/tensor.hpp"
#include "ctables/tilt.hpp"

namespace ctables {

inline constexpr const char* kToolVersion = "0.1.0";

// Large-n limits of the 3-way expected table for a = b = c = (B n^2, n^2, ...).
// Below B_c: r = (1/B + 1)/(1/B_c + 1), Z111 -> 1/(r^3 - 1),
// Z121 -> 1/(2^{1/3} r^2 - 1), Z221 -> 1/(2^{2/3} r - 1), Z222 -> 1.
// Above B_c: Z111 / n^2 -> B - B_c (reported as a slope),
// Z121 -> 1/(2^{1/3} - 1), Z221 -> 1/(2^{2/3} - 1), Z222 -> 1.
struct TheoremLimits {
  double z111 = 0.0;
  double z121 = 0.0;
  double z221 = 0.0;
  double z222 = 1.0;
  bool z111_is_slope = false;
  Regime regime = Regime::Subcritical;
};

TheoremLimits theorem_limits_3way(double B);

struct ScanRow {
  std::size_t n = 0;
  double B = 0.0;
  double P = 0.0, Q = 0.0;
  double Z111 = 0.0, Z121 = 0.0, Z221 = 0.0, Z222 = 0.0;
  double limitZ111 = 0.0, limitZ121 = 0.0, limitZ221 = 0.0, limitZ222 = 0.0;
  Regime regime = Regime::Subcritical;
  double residual = 0.0;
  // |Z - limit|; for Z111 above B_c this is |Z111/n^2 - slope|.
  double errZ111 = 0.0, errZ121 = 0.0, errZ221 = 0.0, errZ222 = 0.0;
  bool converged = true;
};

struct Scan3wayConfig {
  std::vector<double> B;
  std::vector<std::size_t> n;
  double tol = 1e-10;
  unsigned threads = 1;
};

// One row per (n, B), sorted by (n, B). Rows that miss `tol` are kept and
// flagged converged = false.
std::vector<ScanRow> scan_3way(const Scan3wayConfig& config);

std::string scan_3way_header();
std::string scan_3way_csv(const std::vector<ScanRow>& rows);
nlohmann::json to_json(const ScanRow& row);

// Two-valued 2-way margins: floor(n^delta) bezel rows and columns plus n bulk
// rows and columns. With a heavy bezel the bezel margin is floor(B C n) and
// the bulk margin floor(C n); otherwise the roles swap. Row and column
// vectors are built identically; any total deficit is moved onto the last
// bulk column entry and recorded in `adjustment`.
struct TwoWayMargins {
  std::vector<double> rows;
  std::vector<double> cols;
  std::size_t bezel = 0;
  std::int64_t bezel_margin = 0;
  std::int64_t bulk_margin = 0;
  std::int64_t adjustment = 0;
};

TwoWayMargins two_way_margins(std::size_t n, double delta, double B, double C, bool bezel_heavy);

struct Scan2wayRow {
  std::size_t n = 0;
  double B = 0.0;
  double C = 0.0;
  double delta = 0.0;
  bool bezel_heavy = true;
  std::size_t bezel = 0;
  std::int64_t bezel_margin = 0, bulk_margin = 0, adjustment = 0;
  double corner = 0.0;  // Z[0][0]
  double cross = 0.0;   // Z[0][last]
  double bulk = 0.0;    // Z[last][last]
  double critical = 0.0;
  Regime regime = Regime::Subcritical;
  double residual = 0.0;
  bool converged = true;
};

struct Scan2wayConfig {
  double C = 1.0;
  std::vector<double> B;
  std::vector<std::size_t> n;
  double delta = 0.75;
  bool bezel_heavy = true;
  double tol = 1e-10;
  unsigned threads = 1;
};

std::vector<Scan2wayRow> scan_2way(const Scan2wayConfig& config);
std::string scan_2way_csv(const std::vector<Scan2wayRow>& rows);

struct FiberExperimentConfig {
  MarginSpec spec;
  std::uint64_t steps = 10'000;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t seed = 0;
  std::size_t budget = 200'000;
};

// Runs uniform and hypergeometric chains from the north-west corner table.
// When the fiber enumerates within budget the report also carries the exact
// uniform-vs-hypergeometric distance, each chain's distance to its exact
// target and the connectivity of the fiber under the move basis; otherwise
// those fields are omitted ("enumerable": false).
nlohmann::json fiber_experiment(const FiberExperimentConfig& config);

nlohmann::json to_json(const Scan3wayConfig& config);
nlohmann::json to_json(const Scan2wayConfig& config);
Scan3wayConfig scan_3way_config_from_json(const nlohmann::json& j);
Scan2wayConfig scan_2way_config_from_json(const nlohmann::json& j);

// Everything needed to regenerate an output file.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::string version = kToolVersion;
  std::string timestamp;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

// Recomputes the CSV written by a barvinok-scan or scan-2way run.
std::string replay_manifest(const RunManifest& manifest);

// "%.17g"
std::string format_real(double x);

}  // namespace ctables
