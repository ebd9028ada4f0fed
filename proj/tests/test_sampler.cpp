#include <doctest.h>

#include <cmath>

#include "ctables/error.hpp"
#include "ctables/fiber.hpp"
#include "ctables/moves.hpp"
#include "ctables/sampler.hpp"
#include "specs.hpp"

using namespace ctables;

namespace {

ChainStats chain(const MarginSpec& spec, FiberLaw target, std::uint64_t steps, std::uint64_t seed) {
  ChainConfig config;
  config.start = northwest_corner_table(spec);
  config.target = target;
  config.steps = steps;
  config.burn_in = 1000;
  config.seed = seed;
  return run_chain(config, MoveSet::for_dims(spec.dims()));
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("hypergeometric acceptance ratio") {
  const auto minor = MoveSet::basic_2way(2, 2).moves().front();
  const Table t({2, 2}, {1, 1, 1, 0});
  // to [[2,0],[0,1]]: 1*1 / (2*1)
  CHECK(acceptance_ratio(t, minor, +1, FiberLaw::Hypergeometric) == doctest::Approx(0.5).epsilon(1e-15));
  const Table u({2, 2}, {2, 0, 0, 1});
  CHECK(acceptance_ratio(u, minor, -1, FiberLaw::Hypergeometric) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(acceptance_ratio(t, minor, +1, FiberLaw::Uniform) == 1.0);
}

TEST_CASE("uniform target accepts every feasible proposal") {
  const MarginSpec spec{{{2, 2, 2}, {2, 2, 2}}};
  const auto moves = MoveSet::for_dims(spec.dims());
  Table state = northwest_corner_table(spec);
  SplitMix64 rng(99);
  for (int i = 0; i < 5000; ++i) {
    const auto r = mh_step(state, moves, FiberLaw::Uniform, rng);
    CHECK(r.accepted == r.feasible);
  }
  CHECK(has_margins(state, spec));
}

TEST_CASE("a one-table fiber never moves") {
  const MarginSpec spec{{{3, 0}, {2, 1}}};
  REQUIRE(enumerate_fiber(spec).size() == 1);
  const auto stats = chain(spec, FiberLaw::Uniform, 5000, 1);
  CHECK(stats.acceptance_rate == 0.0);
  for (const auto& s : stats.samples) CHECK(s == northwest_corner_table(spec));
}

TEST_CASE("visit frequencies on a two-table fiber") {
  const MarginSpec spec{{{2, 1}, {2, 1}}};
  const auto fiber = enumerate_fiber(spec);
  const std::size_t spread = *fiber.find(Table({2, 2}, {1, 1, 1, 0}));
  const auto uni = empirical_frequencies(fiber, chain(spec, FiberLaw::Uniform, 41000, 5).samples);
  CHECK(std::abs(uni[spread] - 0.5) < 0.03);
  const auto hyp = empirical_frequencies(fiber, chain(spec, FiberLaw::Hypergeometric, 41000, 6).samples);
  CHECK(std::abs(hyp[1 - spread] - 1.0 / 3.0) < 0.02);
}

TEST_CASE("chains are deterministic in the seed") {
  const MarginSpec spec{{{3, 3}, {2, 4}, {3, 3}}};
  const auto a = chain(spec, FiberLaw::Hypergeometric, 20000, 17);
  const auto b = chain(spec, FiberLaw::Hypergeometric, 20000, 17);
  CHECK(a == b);
  const auto c = chain(spec, FiberLaw::Hypergeometric, 20000, 18);
  CHECK_FALSE(a.samples == c.samples);
}

TEST_CASE("thinning and burn-in") {
  ChainConfig config;
  config.start = northwest_corner_table({{{2, 2}, {2, 2}}});
  config.steps = 1000;
  config.burn_in = 100;
  config.thin = 7;
  std::size_t seen = 0;
  const auto stats = run_chain(config, MoveSet::basic_2way(2, 2), [&](const Table&) { ++seen; });
  CHECK(stats.kept == (900 + 6) / 7);
  CHECK(stats.samples.size() == stats.kept);
  CHECK(seen == stats.kept);
  CHECK(stats.corner_trace.size() == stats.kept);
  config.keep_samples = false;
  const auto light = run_chain(config, MoveSet::basic_2way(2, 2));
  CHECK(light.samples.empty());
  CHECK(light.corner_trace == stats.corner_trace);
}

TEST_CASE("config validation") {
  ChainConfig config;
  config.start = Table({2, 2}, {1, 0, 0, 1});
  config.steps = 10;
  config.burn_in = 10;
  CHECK_THROWS_AS(validate_chain_config(config), Error);
  config.burn_in = 0;
  config.thin = 0;
  CHECK_THROWS_AS(validate_chain_config(config), Error);
  config.thin = 1;
  CHECK_NOTHROW(validate_chain_config(config));
  CHECK_THROWS_AS(run_chain(config, MoveSet::basic_2way(3, 3)), Error);
}

TEST_CASE("total variation") {
  CHECK(tv_distance({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(tv_distance({1.0, 0.0}, {0.0, 1.0}) == 1.0);
  CHECK(tv_distance({0.5, 0.5}, {1.0 / 3.0, 2.0 / 3.0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(tv_distance({0.5, 0.5}, {1.0}), Error);
}

TEST_CASE("uniform versus hypergeometric divergence") {
  CHECK(divergence_uniform_vs_hypergeometric(enumerate_fiber({{{1, 1}, {1, 1}}})) == 0.0);
  CHECK(divergence_uniform_vs_hypergeometric(enumerate_fiber({{{2, 1}, {2, 1}}})) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  // corner x in {0,1,2} with hypergeometric weights (1/6, 2/3, 1/6)
  CHECK(divergence_uniform_vs_hypergeometric(enumerate_fiber({{{2, 2}, {2, 2}}})) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("detailed balance and stationarity of the exact kernel") {
  for (const auto& spec : testspecs::small_specs()) {
    const auto fiber = enumerate_fiber(spec);
    if (fiber.size() > 50) continue;
    const auto moves = MoveSet::for_dims(spec.dims());
    for (FiberLaw law : {FiberLaw::Uniform, FiberLaw::Hypergeometric}) {
      const auto pi = fiber_weights(fiber, law).weights;
      const std::size_t k = fiber.size();
      std::vector<std::vector<double>> P(k, std::vector<double>(k, 0.0));
      for (std::size_t i = 0; i < k; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j) continue;
          P[i][j] = transition_probability(fiber.tables[i], fiber.tables[j], moves, law);
          off += P[i][j];
        }
        CHECK(off <= 1.0 + 1e-12);
        P[i][i] = 1.0 - off;
      }
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(pi[i] * P[i][j] - pi[j] * P[j][i]) < 1e-12);
      for (std::size_t j = 0; j < k; ++j) {
        double flow = 0.0;
        for (std::size_t i = 0; i < k; ++i) flow += pi[i] * P[i][j];
        CHECK(std::abs(flow - pi[j]) < 1e-12);
      }
    }
  }
}

TEST_CASE("short chains approach the exact laws") {
  const MarginSpec spec{{{3, 2, 1}, {2, 2, 2}}};
  const auto fiber = enumerate_fiber(spec);
  for (FiberLaw law : {FiberLaw::Uniform, FiberLaw::Hypergeometric}) {
    const auto stats = chain(spec, law, 101000, 11);
    CHECK(tv_distance(empirical_frequencies(fiber, stats.samples), fiber_weights(fiber, law)) < 0.05);
  }
}

}  // TEST_SUITE
