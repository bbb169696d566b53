#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "chainscope/fixtures.hpp"
#include "chainscope/moduli.hpp"

using namespace chainscope;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FixtureSpec spec_of(FixtureName name, std::size_t n, std::string variant = {}) {
  FixtureSpec s;
  s.name = name;
  s.n = n;
  s.variant = std::move(variant);
  return s;
}

MetricSpace grid01(std::size_t steps) {
  std::vector<double> xs;
  for (std::size_t i = 0; i <= steps; ++i) xs.push_back(static_cast<double>(i) / static_cast<double>(steps));
  return line_space(xs);
}

// Pairwise ratio scan restricted by a predicate on the distance.
template <class Keep>
double ratio_scan(const ScalarFunction& f, Keep keep) {
  const MetricSpace& X = f.space();
  double best = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      const double d = X.distance(i, j), df = std::abs(f[i] - f[j]);
      if (!keep(d) || df == 0.0) continue;
      best = std::max(best, d == 0.0 ? kInfinity : df / d);
    }
  return best;
}

}  // namespace

TEST_CASE("scalar functions validate their values", "[moduli]") {
  const MetricSpace X = line_space({0, 1});
  CHECK_THROWS_AS(ScalarFunction(X, {1.0}), Error);
  CHECK_THROWS_AS(ScalarFunction(X, {1.0, NAN}), Error);
  CHECK(ScalarFunction::constant(X, 3.0)[1] == 3.0);
}

TEST_CASE("global Lipschitz constant", "[moduli]") {
  const MetricSpace G = grid01(100);
  const ScalarFunction twice = ScalarFunction::tabulate(G, [](std::size_t i) { return 2.0 * i / 100.0; });
  CHECK_THAT(lipschitz_constant(twice).constant, WithinRel(2.0, 1e-12));
  CHECK(lipschitz_constant(ScalarFunction::constant(G, 1.0)).constant == 0.0);
  CHECK_THROWS_AS(lipschitz_constant(ScalarFunction::constant(line_space({1.0}), 0.0)), Error);

  const Fixture nat = generate(spec_of(FixtureName::naturals_plus, 50));
  const ModulusReport r = lipschitz_constant(nat.canonical_function());
  CHECK_THAT(r.constant, WithinRel(50.0, 1e-9));
  CHECK(r.constant == ratio_scan(nat.canonical_function(), [](double) { return true; }));
  REQUIRE(r.witness);
  const auto [a, b] = *r.witness;
  CHECK(std::minmax(a, b) == std::minmax(nat.label("n50"), nat.label("n50+")));
}

TEST_CASE("duplicate points with different values give an infinite constant", "[moduli]") {
  const MetricSpace X = line_space({0.0, 0.0, 1.0});
  CHECK(std::isinf(lipschitz_constant(ScalarFunction(X, {0.0, 1.0, 0.0})).constant));
  CHECK(lipschitz_constant(ScalarFunction(X, {0.0, 0.0, 1.0})).constant == 1.0);
}

TEST_CASE("Lipschitz in the small", "[moduli]") {
  const Fixture nat = generate(spec_of(FixtureName::naturals_plus, 50));
  const ModulusReport r = lits_modulus(nat.canonical_function(), 0.25);
  CHECK_THAT(r.constant, WithinRel(50.0, 1e-9));
  CHECK(r.scale == 0.25);
  for (std::size_t n : {10u, 20u, 40u}) {
    const Fixture smaller = generate(spec_of(FixtureName::naturals_plus, n));
    CHECK_THAT(lits_modulus(smaller.canonical_function(), 0.25).constant, WithinRel(static_cast<double>(n), 1e-9));
  }

  const MetricSpace G = grid01(50);
  const ScalarFunction twice = ScalarFunction::tabulate(G, [](std::size_t i) { return 2.0 * i / 50.0; });
  CHECK_THAT(lits_modulus(twice, 0.1).constant, WithinRel(2.0, 1e-12));

  const MetricSpace sparse = line_space({0, 1, 2, 3});
  const ModulusReport empty = lits_modulus(ScalarFunction(sparse, {0, 5, 0, 5}), 1.0);
  CHECK(empty.constant == 0.0);
  CHECK_FALSE(empty.witness);
}

TEST_CASE("sequence Lipschitz constants", "[moduli]") {
  const std::size_t N = 300;
  const Fixture h = generate(spec_of(FixtureName::harmonic_sums, N + 1));
  const ModulusReport r = seq_lipschitz_constant(h.canonical_function(), h.canonical_prefix(), SeqMode::consecutive);
  const double n = static_cast<double>(N);
  CHECK_THAT(r.constant, WithinAbs((n + 1) / (std::sqrt(n + 1) + std::sqrt(n)), 1e-9));
  REQUIRE(r.witness);
  CHECK(r.witness->first == N - 1);
  CHECK(r.witness->second == N);

  CHECK(seq_lipschitz_constant(ScalarFunction::constant(h.space, 2.0), h.canonical_prefix(), SeqMode::all_pairs).constant == 0.0);
  CHECK_THROWS_AS(seq_lipschitz_constant(h.canonical_function(), SequencePrefix(h.space, {0}), SeqMode::consecutive), Error);
}

TEST_CASE("even-square-root indicator separates the sequence constants", "[moduli]") {
  double previous = 0.0;
  for (std::size_t n : {20u, 80u, 320u}) {
    const Fixture fx = generate(spec_of(FixtureName::sqrt_space, n));
    const ScalarFunction f = fx.canonical_function();
    std::vector<std::size_t> even;
    for (std::size_t i = 1; i < n; i += 2) even.push_back(i);
    CHECK(seq_lipschitz_constant(f, SequencePrefix(fx.space, even), SeqMode::all_pairs).constant == 0.0);
    const double interleaved = seq_lipschitz_constant(f, fx.canonical_prefix(), SeqMode::consecutive).constant;
    // Direct scan: consecutive sqrt gaps shrink, indicator jumps by 1 each step.
    const double expected = 1.0 / (std::sqrt(static_cast<double>(n)) - std::sqrt(static_cast<double>(n - 1)));
    CHECK_THAT(interleaved, WithinRel(expected, 1e-9));
    CHECK(interleaved > previous);
    previous = interleaved;
  }
}

TEST_CASE("local Lipschitz profile", "[moduli]") {
  const Fixture nat = generate(spec_of(FixtureName::naturals_plus, 50));
  const LocalLipschitzProfile prof = local_lipschitz_profile(nat.canonical_function(), 0.25);
  CHECK_FALSE(prof.has_infinite());
  for (std::size_t i = 5; i <= 50; ++i) {
    const double n = static_cast<double>(i);
    CHECK_THAT(prof.constants[nat.label("n" + std::to_string(i))], WithinRel(n, 1e-9));
    CHECK_THAT(prof.constants[nat.label("n" + std::to_string(i) + "+")], WithinRel(n, 1e-9));
  }

  const Fixture pw = generate(spec_of(FixtureName::scaled_unit_vectors, 12, "shifted"));
  const LocalLipschitzProfile big = local_lipschitz_profile(pw.canonical_function(), 0.5);
  const Fixture pw6 = generate(spec_of(FixtureName::scaled_unit_vectors, 6, "shifted"));
  CHECK(big.max() > local_lipschitz_profile(pw6.canonical_function(), 0.5).max() * 1e3);

  const LocalLipschitzProfile zero = local_lipschitz_profile(ScalarFunction::constant(nat.space, 1.0), 0.25);
  CHECK(zero.max() == 0.0);
}

TEST_CASE("local profile matches a ball-restricted scan", "[moduli][property]") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs(10), vs(10);
    for (double& x : xs) x = u(rng);
    for (double& v : vs) v = u(rng);
    const MetricSpace X = line_space(xs);
    const ScalarFunction f(X, vs);
    const LocalLipschitzProfile prof = local_lipschitz_profile(f, 0.7);
    for (std::size_t x = 0; x < X.size(); ++x) {
      double best = 0.0;
      for (std::size_t a = 0; a < X.size(); ++a)
        for (std::size_t b = 0; b < X.size(); ++b)
          if (a != b && X.distance(x, a) < 0.7 && X.distance(x, b) < 0.7)
            best = std::max(best, std::abs(vs[a] - vs[b]) / X.distance(a, b));
      CHECK(prof.constants[x] == best);
    }
  }
}

TEST_CASE("modulus ordering properties", "[moduli][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> xs(12), vs(12);
    for (double& x : xs) x = u(rng);
    for (double& v : vs) v = u(rng);
    const MetricSpace X = line_space(xs);
    const ScalarFunction f(X, vs);
    const double global = lipschitz_constant(f).constant;
    CHECK(global == ratio_scan(f, [](double) { return true; }));
    CHECK(lits_modulus(f, X.diameter() + 1.0).constant == global);

    double previous = kInfinity;
    for (double delta : {3.0, 1.0, 0.5, 0.1}) {
      const double lits = lits_modulus(f, delta).constant;
      CHECK(lits == ratio_scan(f, [delta](double d) { return d < delta; }));
      CHECK(lits <= previous);
      CHECK(lits <= global);
      previous = lits;
    }

    std::vector<std::size_t> idx(15);
    for (std::size_t& i : idx) i = rng() % xs.size();
    const SequencePrefix p(X, idx);
    const double consecutive = seq_lipschitz_constant(f, p, SeqMode::consecutive).constant;
    const double all = seq_lipschitz_constant(f, p, SeqMode::all_pairs).constant;
    CHECK(all >= consecutive);
    double widest = 0.0;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) widest = std::max(widest, p.gap(k, k + 1));
    CHECK(lits_modulus(f, widest + 1e-9).constant >= consecutive);
  }
}

TEST_CASE("ward falsifier", "[moduli]") {
  SECTION("square root over harmonic sums") {
    const Fixture h = generate(spec_of(FixtureName::harmonic_sums, 400));
    const ScalarFunction f = h.canonical_function();
    const WardResult r = ward_falsifier(f, 0.02);
    REQUIRE(r.found);
    const SequencePrefix witness(h.space, r.prefix);
    CHECK(quasi_cauchy_test(witness, r.schedule).consistent());
    CHECK(r.image_gap >= 0.02);
    CHECK(r.image_gap == std::abs(f[r.prefix[r.position]] - f[r.prefix[r.position + 1]]));
    CHECK(r.domain_gap < 0.02);
    CHECK(r.evaluations <= 64);
  }
  SECTION("identity on a grid never jumps") {
    const MetricSpace G = grid01(100);
    const ScalarFunction id = ScalarFunction::tabulate(G, [](std::size_t i) { return i / 100.0; });
    WardSearch search;
    search.budget = 20;
    const WardResult r = ward_falsifier(id, 0.05, search);
    CHECK_FALSE(r.found);
    CHECK(r.evaluations == 20);
  }
  SECTION("indicator of the integers") {
    const Fixture nat = generate(spec_of(FixtureName::naturals_plus, 50));
    const ScalarFunction f = nat.canonical_function();
    const WardResult r = ward_falsifier(f, 0.5);
    REQUIRE(r.found);
    CHECK(quasi_cauchy_test(SequencePrefix(nat.space, r.prefix), r.schedule).consistent());
    CHECK(r.image_gap == 1.0);
  }
  CHECK_THROWS_AS(ward_falsifier(ScalarFunction::constant(grid01(3), 0.0), 0.0), Error);
}

TEST_CASE("equi-chain continuity of the ramps", "[moduli]") {
  FixtureSpec spec = spec_of(FixtureName::tent_family, 30, "ramp");
  const Fixture fx = generate(spec);
  const auto family = fx.family_functions();
  const EquiReport chain = equi_chain_continuity_check(family, 0.2, 0.035);
  CHECK(chain.passes);
  for (std::size_t c : chain.certificate) CHECK(c != kUnreachable);

  const std::size_t zero = 0;
  REQUIRE(fx.domain->size() > 0);
  const EquiReport plain = equicontinuity_check(family, 0.5, 0.035, zero);
  CHECK_FALSE(plain.passes);
  REQUIRE(plain.witness);
  CHECK(plain.witness->point == 0);
  CHECK(plain.witness->deviation == 1.0);

  // Grid-max oracle for the neighbouring sup gaps.
  for (std::size_t n = 1; n < fx.family.size(); ++n) {
    double gap = 0.0;
    for (std::size_t x = 0; x < fx.family[n].size(); ++x)
      gap = std::max(gap, std::abs(fx.family[n][x] - fx.family[n - 1][x]));
    CHECK_THAT(gap, WithinAbs(1.0 / static_cast<double>(n + 1), 1e-12));
  }
}

TEST_CASE("equicontinuity edge cases", "[moduli]") {
  const MetricSpace G = grid01(10);
  const std::vector<ScalarFunction> single{ScalarFunction::constant(G, 4.0)};
  const EquiReport r = equi_chain_continuity_check(single, 0.1, 0.05);
  CHECK(r.passes);
  CHECK(r.certificate == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(equi_chain_continuity_check(std::vector<ScalarFunction>{}, 0.1, 0.05), Error);
}

TEST_CASE("equi-chain continuity reduces to equicontinuity for separated families", "[moduli][property]") {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MetricSpace G = grid01(20);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ScalarFunction> family;
    for (int m = 0; m < 4; ++m) {
      // Offsets 10 apart keep every pair of members beyond eps in sup distance.
      const double slope = 4.0 * u(rng);
      family.push_back(ScalarFunction::tabulate(G, [&](std::size_t i) { return 10.0 * m + slope * i / 20.0; }));
    }
    const double eps = 0.3;
    const EquiReport chain = equi_chain_continuity_check(family, eps, 0.06);
    const EquiReport plain = equicontinuity_check(family, eps, 0.06);
    CHECK(chain.passes == plain.passes);
    // Direct check: each member varies by < eps on every 0.06-ball.
    bool direct = true;
    for (const ScalarFunction& f : family)
      for (std::size_t x = 0; x < G.size(); ++x)
        for (std::size_t y = 0; y < G.size(); ++y)
          if (G.distance(x, y) < 0.06 && !(std::abs(f[x] - f[y]) < eps)) direct = false;
    CHECK(plain.passes == direct);
  }
}

TEST_CASE("l^p tail criterion", "[moduli]") {
  SECTION("unit vectors chained to a short tail") {
    std::vector<SparseVector> family;
    for (std::size_t n = 1; n <= 10; ++n) family.push_back(SparseVector::unit(n));
    // Walk from e_1 down to 0 and on to each e_n in steps of 0.1.
    for (std::size_t n = 1; n <= 10; ++n)
      for (int s = 1; s < 10; ++s) family.push_back(SparseVector::unit(n, s / 10.0));
    family.emplace_back();
    const TailReport r = lp_tail_criterion(family, 2.0, 0.15, 1);
    CHECK(r.passes);
    for (std::size_t c : r.certificate) {
      REQUIRE(c != kUnreachable);
      CHECK(family[c].tail_mass(1, 2.0) < 0.15 * 0.15);
    }
  }
  SECTION("short supports certify themselves") {
    const std::vector<SparseVector> family{SparseVector{{0, 1.0}, {2, 3.0}}, SparseVector{{1, -2.0}}};
    const TailReport r = lp_tail_criterion(family, 1.0, 0.5, 2);
    CHECK(r.passes);
    CHECK(r.certificate == std::vector<std::size_t>{0, 1});
  }
  SECTION("isolated unit vectors fail") {
    std::vector<SparseVector> family;
    for (std::size_t n = 1; n <= 20; ++n) family.push_back(SparseVector::unit(n));
    const TailReport r = lp_tail_criterion(family, 2.0, 0.5, 0);
    CHECK_FALSE(r.passes);
    CHECK(r.failing == 0u);
  }
  CHECK_THROWS_AS(lp_tail_criterion(std::vector<SparseVector>{}, 2.0, 0.5, 0), Error);
  CHECK_THROWS_AS(lp_tail_criterion(std::vector<SparseVector>{SparseVector{}}, 0.5, 0.5, 0), Error);
}

TEST_CASE("spike functions", "[moduli]") {
  std::vector<double> xs;
  for (int i = -20; i <= 20; ++i) xs.push_back(i / 10.0);
  const MetricSpace L = line_space(xs);
  const std::vector<std::size_t> center{20};
  const std::vector<double> radius{1.0}, height{1.0};
  const ScalarFunction tent = spike_function(L, center, radius, height);
  CHECK(tent[20] == 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double expected = std::abs(xs[i]) < 1.0 ? 1.0 - std::abs(xs[i]) : 0.0;
    CHECK_THAT(tent[i], WithinAbs(expected, 1e-12));
  }

  const ScalarFunction none = spike_function(L, {}, {}, {});
  CHECK(lipschitz_constant(none).constant == 0.0);

  const std::vector<std::size_t> two{18, 22};
  const std::vector<double> wide{0.5, 0.5}, unit{1.0, 1.0};
  try {
    (void)spike_function(L, two, wide, unit);
    FAIL("expected overlapping balls");
  } catch (const OverlappingBalls& e) {
    CHECK(e.first() == 0);
    CHECK(e.second() == 1);
    CHECK(L.distance(e.point(), 18) < 0.5);
    CHECK(L.distance(e.point(), 22) < 0.5);
  }
  CHECK_THROWS_AS(spike_function(L, two, std::vector<double>{0.1}, unit), Error);
  CHECK_THROWS_AS(spike_function(L, two, std::vector<double>{0.1, 0.0}, unit), Error);
}

TEST_CASE("spikes on the square roots are locally Lipschitz but diverge along a walk", "[moduli]") {
  double previous = 0.0;
  for (std::size_t n : {40u, 160u, 640u}) {
    const Fixture fx = generate(spec_of(FixtureName::sqrt_space, n));
    std::vector<std::size_t> centers;
    std::vector<double> radii, heights;
    for (std::size_t i = 1; i < n; i += 2) {
      centers.push_back(i);
      radii.push_back(0.25 * isolation(fx.space, i));
      heights.push_back(static_cast<double>(centers.size()));
    }
    const ScalarFunction f = spike_function(fx.space, centers, radii, heights);
    for (std::size_t k = 0; k < centers.size(); ++k) CHECK(f[centers[k]] == heights[k]);
    // Every ball holds only its centre, so away from centres f vanishes.
    CHECK(f[0] == 0.0);
    const double qc = seq_lipschitz_constant(f, fx.canonical_prefix(), SeqMode::consecutive).constant;
    CHECK(qc > previous * 2.0);
    previous = qc;
  }
}

TEST_CASE("spike values vanish outside the balls", "[moduli][property]") {
  std::mt19937_64 rng(41);
  const MetricSpace G = grid01(200);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> centers;
    std::vector<double> radii, heights;
    for (std::size_t c = 10; c < 200; c += 40) {
      centers.push_back(c + rng() % 10);
      radii.push_back(0.01 + 0.05 * static_cast<double>(rng() % 100) / 100.0);
      heights.push_back(static_cast<double>(rng() % 7) - 3.0);
    }
    const ScalarFunction f = spike_function(G, centers, radii, heights);
    for (std::size_t x = 0; x < G.size(); ++x) {
      bool inside = false;
      for (std::size_t k = 0; k < centers.size(); ++k) inside = inside || G.distance(x, centers[k]) < radii[k];
      if (!inside) CHECK(f[x] == 0.0);
    }
    for (std::size_t k = 0; k < centers.size(); ++k) CHECK(f[centers[k]] == heights[k]);
  }
}

TEST_CASE("modulus names", "[moduli]") {
  CHECK(modulus_name(ModulusKind::lits) == "lits");
  CHECK(modulus_name(ModulusKind::qc_seq) == "qc-seq");
}
