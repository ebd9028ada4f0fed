#include "ctables/phase.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ctables/error.hpp"
#include "ctables/fiber.hpp"
#include "ctables/io.hpp"
#include "ctables/moves.hpp"
#include "ctables/sampler.hpp"

namespace ctables {

namespace {

// Evaluates task(i) for i in [0, count) on up to `threads` workers; results
// land in index order, so output does not depend on the thread count.
template <typename Result, typename Task>
std::vector<Result> parallel_map(std::size_t count, unsigned threads, Task task) {
  std::vector<Result> results(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          results[i] = task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

TheoremLimits theorem_limits_3way(double B) {
  if (!(B > 0.0) || !std::isfinite(B)) throw Error(ErrorKind::InvalidInput, "B must be positive");
  const double Bc = critical_ratio_3way();
  const double cbrt2 = std::cbrt(2.0);
  const double cbrt4 = std::cbrt(4.0);
  TheoremLimits lim;
  lim.regime = classify_regime(B, Bc);
  lim.z222 = 1.0;
  if (B < Bc) {
    const double r = (1.0 / B + 1.0) / (1.0 / Bc + 1.0);
    lim.z111 = 1.0 / (r * r * r - 1.0);
    lim.z121 = 1.0 / (cbrt2 * r * r - 1.0);
    lim.z221 = 1.0 / (cbrt4 * r - 1.0);
  } else {
    lim.z111 = B - Bc;
    lim.z111_is_slope = true;
    lim.z121 = 1.0 / (cbrt2 - 1.0);
    lim.z221 = 1.0 / (cbrt4 - 1.0);
  }
  return lim;
}

std::vector<ScanRow> scan_3way(const Scan3wayConfig& config) {
  const auto ns = sorted_unique(config.n);
  const auto Bs = sorted_unique(config.B);
  if (ns.empty() || Bs.empty()) throw Error(ErrorKind::InvalidInput, "scan grids must be nonempty");
  for (auto n : ns)
    if (n < 2) throw Error(ErrorKind::InvalidInput, "scan needs n >= 2");
  for (auto B : Bs)
    if (!(B > 0.0)) throw Error(ErrorKind::InvalidInput, "scan needs B > 0");

  return parallel_map<ScanRow>(ns.size() * Bs.size(), config.threads, [&](std::size_t idx) {
    const std::size_t n = ns[idx / Bs.size()];
    const double B = Bs[idx % Bs.size()];
    const auto sol = barvinok_solve_unchecked(n, B);
    const auto z = sol.cells();
    const auto lim = theorem_limits_3way(B);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    ScanRow row;
    row.n = n;
    row.B = B;
    row.P = sol.P;
    row.Q = sol.Q;
    row.Z111 = z.z111;
    row.Z121 = z.z121;
    row.Z221 = z.z221;
    row.Z222 = z.z222;
    row.limitZ111 = lim.z111;
    row.limitZ121 = lim.z121;
    row.limitZ221 = lim.z221;
    row.limitZ222 = lim.z222;
    row.regime = lim.regime;
    row.residual = sol.residual;
    row.errZ111 = lim.z111_is_slope ? std::abs(z.z111 / n2 - lim.z111) : std::abs(z.z111 - lim.z111);
    row.errZ121 = std::abs(z.z121 - lim.z121);
    row.errZ221 = std::abs(z.z221 - lim.z221);
    row.errZ222 = std::abs(z.z222 - lim.z222);
    row.converged = sol.residual <= config.tol;
    return row;
  });
}

std::string scan_3way_header() {
  return "n,B,P,Q,Z111,Z121,Z221,Z222,limitZ111,limitZ121,limitZ221,limitZ222,regime,residual,"
         "errZ111,errZ121,errZ221,errZ222,converged\n";
}

std::string scan_3way_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out << scan_3way_header();
  for (const auto& r : rows) {
    out << r.n;
    for (double x : {r.B, r.P, r.Q, r.Z111, r.Z121, r.Z221, r.Z222, r.limitZ111, r.limitZ121,
                     r.limitZ221, r.limitZ222})
      out << ',' << format_real(x);
    out << ',' << to_string(r.regime) << ',' << format_real(r.residual);
    for (double x : {r.errZ111, r.errZ121, r.errZ221, r.errZ222}) out << ',' << format_real(x);
    out << ',' << yes_no(r.converged) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ScanRow& r) {
  return {{"n", r.n},
          {"B", r.B},
          {"P", r.P},
          {"Q", r.Q},
          {"Z111", r.Z111},
          {"Z121", r.Z121},
          {"Z221", r.Z221},
          {"Z222", r.Z222},
          {"limitZ111", r.limitZ111},
          {"limitZ121", r.limitZ121},
          {"limitZ221", r.limitZ221},
          {"limitZ222", r.limitZ222},
          {"regime", to_string(r.regime)},
          {"residual", r.residual},
          {"errZ111", r.errZ111},
          {"errZ121", r.errZ121},
          {"errZ221", r.errZ221},
          {"errZ222", r.errZ222},
          {"converged", r.converged}};
}

TwoWayMargins two_way_margins(std::size_t n, double delta, double B, double C, bool bezel_heavy) {
  if (n < 1 || !(C > 0.0) || !(B > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw Error(ErrorKind::InvalidInput, "2-way margins need n >= 1, B > 0, C > 0, 0 < delta < 1");
  const double nd = static_cast<double>(n);
  TwoWayMargins m;
  m.bezel = static_cast<std::size_t>(std::floor(std::pow(nd, delta)));
  const auto heavy = static_cast<std::int64_t>(std::floor(B * C * nd));
  const auto light = static_cast<std::int64_t>(std::floor(C * nd));
  m.bezel_margin = bezel_heavy ? heavy : light;
  m.bulk_margin = bezel_heavy ? light : heavy;
  if (m.bezel == 0 || m.bezel_margin <= 0 || m.bulk_margin <= 0)
    throw Error(ErrorKind::UnbalancedMargins, "two-value construction yields an empty margin class");
  std::vector<std::int64_t> rows(m.bezel, m.bezel_margin);
  rows.insert(rows.end(), n, m.bulk_margin);
  std::vector<std::int64_t> cols = rows;
  std::int64_t row_total = 0, col_total = 0;
  for (auto v : rows) row_total += v;
  for (auto v : cols) col_total += v;
  m.adjustment = row_total - col_total;
  cols.back() += m.adjustment;
  if (cols.back() <= 0)
    throw Error(ErrorKind::UnbalancedMargins,
                "balancing adjustment " + std::to_string(m.adjustment) + " empties the last column");
  m.rows.assign(rows.begin(), rows.end());
  m.cols.assign(cols.begin(), cols.end());
  return m;
}

std::vector<Scan2wayRow> scan_2way(const Scan2wayConfig& config) {
  const auto ns = sorted_unique(config.n);
  const auto Bs = sorted_unique(config.B);
  if (ns.empty() || Bs.empty()) throw Error(ErrorKind::InvalidInput, "scan grids must be nonempty");
  const double critical = critical_ratio_2way(config.C);
  return parallel_map<Scan2wayRow>(ns.size() * Bs.size(), config.threads, [&](std::size_t idx) {
    Scan2wayRow row;
    row.n = ns[idx / Bs.size()];
    row.B = Bs[idx % Bs.size()];
    row.C = config.C;
    row.delta = config.delta;
    row.bezel_heavy = config.bezel_heavy;
    const auto m = two_way_margins(row.n, config.delta, row.B, config.C, config.bezel_heavy);
    row.bezel = m.bezel;
    row.bezel_margin = m.bezel_margin;
    row.bulk_margin = m.bulk_margin;
    row.adjustment = m.adjustment;
    const auto typical = typical_table_2way(m.rows, m.cols, SolveOptions{config.tol, 500});
    const auto& z = typical.table;
    const std::size_t last = m.rows.size() - 1;
    row.corner = z.at({0, 0});
    row.cross = z.at({0, last});
    row.bulk = z.at({last, last});
    row.critical = critical;
    row.regime = classify_regime(row.B, critical);
    row.residual = typical.report.residual_inf;
    row.converged = typical.report.converged;
    return row;
  });
}

std::string scan_2way_csv(const std::vector<Scan2wayRow>& rows) {
  std::ostringstream out;
  out << "n,B,C,delta,bezel_heavy,bezel,bezel_margin,bulk_margin,adjustment,corner,cross,bulk,"
         "critical,regime,residual,converged\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_real(r.B) << ',' << format_real(r.C) << ',' << format_real(r.delta)
        << ',' << yes_no(r.bezel_heavy) << ',' << r.bezel << ',' << r.bezel_margin << ','
        << r.bulk_margin << ',' << r.adjustment << ',' << format_real(r.corner) << ','
        << format_real(r.cross) << ',' << format_real(r.bulk) << ',' << format_real(r.critical)
        << ',' << to_string(r.regime) << ',' << format_real(r.residual) << ','
        << yes_no(r.converged) << '\n';
  }
  return out.str();
}

nlohmann::json fiber_experiment(const FiberExperimentConfig& config) {
  validate_margin_spec(config.spec);
  nlohmann::json report;
  report["spec"] = to_json(config.spec);
  report["steps"] = config.steps;
  report["burn_in"] = config.burn_in;
  report["thin"] = config.thin;
  report["seed"] = config.seed;

  std::optional<Fiber> fiber;
  try {
    fiber = enumerate_fiber(config.spec, config.budget);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  report["enumerable"] = fiber.has_value();

  const Dims dims = config.spec.dims();
  for (auto d : dims)
    if (d < 2) throw Error(ErrorKind::InvalidInput, "sampling needs every dimension >= 2");
  const MoveSet moves = MoveSet::for_dims(dims);
  if (fiber) {
    report["fiber_size"] = fiber->size();
    report["uniform_vs_hypergeometric_tv"] = divergence_uniform_vs_hypergeometric(*fiber);
    if (moves.materialized()) {
      const auto conn = connectivity_check(*fiber, moves);
      report["connected"] = conn.connected;
      report["components"] = conn.components;
    }
  }

  const Table start = northwest_corner_table(config.spec);
  nlohmann::json chains = nlohmann::json::object();
  for (FiberLaw law : {FiberLaw::Uniform, FiberLaw::Hypergeometric}) {
    ChainConfig cc{start, law, config.steps, config.burn_in, config.thin, config.seed, false};
    std::vector<double> counts(fiber ? fiber->size() : 0, 0.0);
    std::map<std::int64_t, std::uint64_t> corner_hist;
    const auto stats = run_chain(cc, moves, [&](const Table& t) {
      ++corner_hist[t[0]];
      if (fiber) counts[*fiber->find(t)] += 1.0;
    });
    nlohmann::json chain;
    chain["acceptance_rate"] = stats.acceptance_rate;
    chain["kept"] = stats.kept;
    nlohmann::json hist = nlohmann::json::object();
    for (auto [value, count] : corner_hist) hist[std::to_string(value)] = count;
    chain["corner_histogram"] = hist;
    if (fiber) {
      for (auto& c : counts) c /= static_cast<double>(stats.kept);
      chain["tv_to_exact"] = tv_distance(counts, fiber_weights(*fiber, law));
    }
    chains[law == FiberLaw::Uniform ? "uniform" : "hypergeometric"] = chain;
  }
  report["chains"] = chains;
  return report;
}

nlohmann::json to_json(const Scan3wayConfig& c) {
  return {{"B", c.B}, {"n", c.n}, {"tol", c.tol}, {"threads", c.threads}};
}

nlohmann::json to_json(const Scan2wayConfig& c) {
  return {{"C", c.C},         {"B", c.B},     {"n", c.n},
          {"delta", c.delta}, {"bezel_heavy", c.bezel_heavy},
          {"tol", c.tol},     {"threads", c.threads}};
}

Scan3wayConfig scan_3way_config_from_json(const nlohmann::json& j) {
  try {
    Scan3wayConfig c;
    c.B = j.at("B").get<std::vector<double>>();
    c.n = j.at("n").get<std::vector<std::size_t>>();
    c.tol = j.value("tol", c.tol);
    c.threads = j.value("threads", c.threads);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad scan config: ") + e.what());
  }
}

Scan2wayConfig scan_2way_config_from_json(const nlohmann::json& j) {
  try {
    Scan2wayConfig c;
    c.C = j.at("C").get<double>();
    c.B = j.at("B").get<std::vector<double>>();
    c.n = j.at("n").get<std::vector<std::size_t>>();
    c.delta = j.at("delta").get<double>();
    c.bezel_heavy = j.value("bezel_heavy", c.bezel_heavy);
    c.tol = j.value("tol", c.tol);
    c.threads = j.value("threads", c.threads);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad scan config: ") + e.what());
  }
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config", m.config},
          {"seeds", m.seeds},
          {"version", m.version},
          {"timestamp", m.timestamp}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    m.version = j.value("version", std::string(kToolVersion));
    m.timestamp = j.value("timestamp", std::string());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad manifest: ") + e.what());
  }
}

std::string replay_manifest(const RunManifest& manifest) {
  if (manifest.command == "barvinok-scan")
    return scan_3way_csv(scan_3way(scan_3way_config_from_json(manifest.config)));
  if (manifest.command == "scan-2way")
    return scan_2way_csv(scan_2way(scan_2way_config_from_json(manifest.config)));
  throw Error(ErrorKind::InvalidInput, "cannot replay command '" + manifest.command + "'");
}

}  // namespace ctables
