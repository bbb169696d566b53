#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "chainscope/fixtures.hpp"
#include "chainscope/harness.hpp"

using namespace chainscope;
using Catch::Matchers::WithinAbs;

namespace {

FixtureSpec make(FixtureName name, std::size_t n, std::size_t subdiv = 1, std::string variant = {}) {
  FixtureSpec s;
  s.name = name;
  s.n = n;
  s.subdiv = subdiv;
  s.variant = std::move(variant);
  return s;
}

// Sup norm of a - b on explicit coordinate maps.
double sup_diff(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b) {
  double out = 0.0;
  for (const auto& [k, v] : a) out = std::max(out, std::abs(v - (b.count(k) ? b.at(k) : 0.0)));
  for (const auto& [k, v] : b) out = std::max(out, std::abs(v - (a.count(k) ? a.at(k) : 0.0)));
  return out;
}

// Points of segment X_i (coordinates i and i + 1) on the grid k / m.
std::vector<std::map<std::size_t, double>> segment_points(std::size_t i, std::size_t m) {
  std::vector<std::map<std::size_t, double>> out;
  for (std::size_t k = 0; k <= m; ++k)
    out.push_back({{i, static_cast<double>(m - k) / static_cast<double>(m)}, {i + 1, static_cast<double>(k) / static_cast<double>(m)}});
  return out;
}

}  // namespace

TEST_CASE("fixture names round trip", "[fixtures]") {
  for (const auto& [value, text] : fixture_names()) {
    CHECK(parse_fixture_name(text) == value);
    CHECK(fixture_name(value) == text);
  }
  CHECK_THROWS_AS(parse_fixture_name("no-such-space"), Error);
}

TEST_CASE("generation is deterministic", "[fixtures]") {
  for (const FixtureSpec& spec : verification_specs()) {
    const Fixture a = generate(spec), b = generate(spec);
    REQUIRE(a.space.size() == b.space.size());
    CHECK(a.prefix == b.prefix);
    CHECK(a.function == b.function);
    const std::size_t n = std::min<std::size_t>(a.space.size(), 40);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(a.space.raw_distance(i, j) == b.space.raw_distance(i, j));
  }
}

TEST_CASE("invalid parameters are rejected", "[fixtures]") {
  CHECK_THROWS_AS(generate(make(FixtureName::grid_interval, 0)), Error);
  CHECK_THROWS_AS(generate(make(FixtureName::segment_chain, 4, 0)), Error);
  CHECK_THROWS_AS(generate(make(FixtureName::tent_family, 4, 1, "wave")), Error);
  CHECK_THROWS_AS(generate(make(FixtureName::scaled_unit_vectors, 4, 1, "spiral")), Error);
  CHECK_THROWS_AS(generate(make(FixtureName::scaled_unit_vectors, 65, 1, "shifted")), Error);
  CHECK_THROWS_AS(generate(make(FixtureName::slow_spike_grid, 5)), Error);
  FixtureSpec flat = make(FixtureName::grid_interval, 4);
  flat.lo = flat.hi = 1.0;
  CHECK_THROWS_AS(generate(flat), Error);
}

TEST_CASE("missing fixture parts throw", "[fixtures]") {
  const Fixture seg = generate(make(FixtureName::segment_chain, 3));
  CHECK_THROWS_AS(seg.canonical_function(), Error);
  CHECK_THROWS_AS(seg.family_functions(), Error);
  CHECK_THROWS_AS(seg.label("e99"), Error);
  CHECK(canonical_claims(make(FixtureName::grid_interval, 5)).empty());
}

TEST_CASE("bounded line", "[fixtures]") {
  const Fixture fx = generate(make(FixtureName::bounded_line, 5, 2));
  REQUIRE(fx.space.size() == 11);
  for (std::size_t i = 0; i < 11; ++i)
    for (std::size_t j = 0; j < 11; ++j)
      CHECK(fx.space.distance(i, j) == std::min(1.0, std::abs(static_cast<double>(i) - static_cast<double>(j)) / 2.0));
  CHECK(fx.space.diameter() == 1.0);
}

TEST_CASE("segment chain matches explicit coordinates", "[fixtures]") {
  const std::size_t N = 6, subdiv = 2;
  const Fixture fx = generate(make(FixtureName::segment_chain, N, subdiv));
  std::vector<std::map<std::size_t, double>> points;
  for (std::size_t i = 1; i <= N; ++i) {
    auto seg = segment_points(i, subdiv * (i + 1));
    // Each later segment starts at the endpoint shared with the previous one.
    points.insert(points.end(), seg.begin() + (i == 1 ? 0 : 1), seg.end());
  }
  REQUIRE(fx.space.size() == points.size());
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = 0; b < points.size(); ++b) CHECK(fx.space.distance(a, b) == sup_diff(points[a], points[b]));
  REQUIRE(fx.segments.size() == N);
  for (std::size_t i = 1; i <= N; ++i) {
    CHECK(fx.segments[i - 1].size() == subdiv * (i + 1) + 1);
    const std::size_t e = fx.label("e" + std::to_string(i));
    CHECK(sup_diff(points[e], {{i, 1.0}}) == 0.0);
  }
  CHECK(fx.prefix.size() == points.size());
}

TEST_CASE("separated segments are half apart on an even grid", "[fixtures]") {
  const Fixture even = generate(make(FixtureName::segment_chain, 8, 2));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 2; j < 8; ++j) CHECK(set_distance(even.space, even.segments[i], even.segments[j]) == 0.5);

  // With one subdivision X_2 sits on thirds, so the closest it gets to X_4 is 2/3.
  const Fixture odd = generate(make(FixtureName::segment_chain, 12, 1));
  CHECK_THAT(set_distance(odd.space, odd.segments[1], odd.segments[3]), WithinAbs(2.0 / 3.0, 1e-15));
}

TEST_CASE("tent pieces", "[fixtures]") {
  const std::size_t N = 5;
  const Fixture fx = generate(make(FixtureName::tent_family, N));
  REQUIRE(fx.domain);
  CHECK(fx.domain->size() == N + 2);
  CHECK(fx.space.size() == fx.family.size());
  for (std::size_t a = 0; a < fx.family.size(); ++a)
    for (std::size_t b = 0; b < fx.family.size(); ++b) {
      double sup = 0.0;
      for (std::size_t x = 0; x < fx.family[a].size(); ++x) sup = std::max(sup, std::abs(fx.family[a][x] - fx.family[b][x]));
      CHECK(fx.space.distance(a, b) == sup);
    }
  // Value 0 at the domain point 0 throughout.
  for (const auto& row : fx.family) CHECK(row[0] == 0.0);
  for (std::size_t k = 0; k + 1 < fx.prefix.size(); ++k) CHECK(fx.space.distance(k, k + 1) > 0.0);
  CHECK(fx.family_functions().size() == fx.family.size());
}

TEST_CASE("tent ramps", "[fixtures]") {
  FixtureSpec spec = make(FixtureName::tent_family, 12, 1, "ramp");
  spec.grid = 50;
  const Fixture fx = generate(spec);
  REQUIRE(fx.family.size() == 12);
  const auto& xs = std::get<Euclidean>(fx.domain->data()).coords;
  CHECK(std::is_sorted(xs.begin(), xs.end()));
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t x = 0; x < xs.size(); ++x) CHECK_THAT(fx.family[n - 1][x], WithinAbs(std::min(1.0, n * xs[x]), 1e-15));
  for (std::size_t n = 1; n < 12; ++n) CHECK_THAT(fx.space.distance(n - 1, n), WithinAbs(1.0 / (n + 1), 1e-12));
  spec.grid = 1;
  CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("line fixtures", "[fixtures]") {
  const Fixture h = generate(make(FixtureName::harmonic_sums, 30));
  double sum = 0.0;
  for (std::size_t i = 1; i <= 30; ++i) {
    sum += 1.0 / static_cast<double>(i);
    CHECK(h.space.distance(0, i - 1) == std::abs(sum - 1.0));
    CHECK((*h.function)[i - 1] == std::sqrt(static_cast<double>(i)));
  }

  const Fixture s = generate(make(FixtureName::sqrt_space, 9));
  CHECK(s.space.distance(0, 3) == 1.0);
  CHECK(*s.function == std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1, 0});

  FixtureSpec g = make(FixtureName::grid_interval, 4);
  g.lo = -1.0;
  g.hi = 1.0;
  const Fixture grid = generate(g);
  CHECK(grid.space.size() == 5);
  CHECK(grid.space.diameter() == 2.0);
  CHECK(grid.space.distance(0, 1) == 0.5);
}

TEST_CASE("naturals with shifted partners", "[fixtures]") {
  const Fixture fx = generate(make(FixtureName::naturals_plus, 10));
  CHECK(fx.space.size() == 19);
  for (std::size_t i = 1; i <= 10; ++i) {
    const std::size_t at = fx.label("n" + std::to_string(i));
    CHECK((*fx.function)[at] == 1.0);
    if (i >= 2) {
      const std::size_t plus = fx.label("n" + std::to_string(i) + "+");
      CHECK((*fx.function)[plus] == 0.0);
      CHECK_THAT(fx.space.distance(at, plus), WithinAbs(1.0 / i, 1e-14));
    }
  }
  CHECK_THROWS_AS(fx.label("n1+"), Error);
}

TEST_CASE("scaled unit vectors", "[fixtures]") {
  FixtureSpec rays = make(FixtureName::scaled_unit_vectors, 4, 1, "rays");
  rays.grid = 0.25;
  const Fixture r = generate(rays);
  CHECK(r.space.size() == 1 + 4 * 4);
  CHECK(r.prefix.size() == 4);
  for (std::size_t i = 1; i <= 4; ++i) {
    CHECK(r.space.distance(0, r.label("e" + std::to_string(i))) == 1.0);
    for (std::size_t j = i + 1; j <= 4; ++j)
      CHECK(r.space.distance(r.label("e" + std::to_string(i)), r.label("e" + std::to_string(j))) == 1.0);
  }

  const Fixture s = generate(make(FixtureName::scaled_unit_vectors, 5, 1, "shifted"));
  CHECK(s.space.size() == 25);
  CHECK((*s.function)[s.label("p3_2")] == 9.0);
  // Same i, different k: both 1/i bumps count in the sup norm.
  CHECK(s.space.distance(s.label("p4_2"), s.label("p4_3")) == 0.25);
  // p_i_1 carries i + 1/i on coordinate 1.
  CHECK_THAT(s.space.distance(s.label("p2_1"), s.label("p3_1")), WithinAbs(5.0 / 6.0, 1e-14));

  const Fixture q = generate(make(FixtureName::scaled_unit_vectors, 5, 1, "sqrt-shifted"));
  CHECK_THAT(q.space.distance(q.label("p1_2"), q.label("p4_2")), WithinAbs(1.0, 1e-14));
}

TEST_CASE("slow spike grid", "[fixtures]") {
  FixtureSpec spec = make(FixtureName::slow_spike_grid, 100);
  spec.height = 2.0;
  const Fixture fx = generate(spec);
  const auto& f = *fx.function;
  for (std::size_t i = 0; i <= 100; ++i) {
    // Nearest centre 5, 15, ..., 95 and the tent value 1.5 grid steps wide.
    const std::size_t c = std::min<std::size_t>(95, (i / 10) * 10 + 5);
    const double steps = std::abs(static_cast<double>(i) - static_cast<double>(c));
    const double expected = steps < 1.5 ? 2.0 * (1.0 - steps / 1.5) : 0.0;
    CHECK_THAT(f[i], WithinAbs(expected, 1e-12));
  }
}

TEST_CASE("every canonical claim holds at the verification settings", "[fixtures][claims]") {
  for (const FixtureSpec& spec : verification_specs()) {
    const Fixture fx = generate(spec);
    for (const Claim& claim : canonical_claims(spec)) {
      INFO(fixture_name(spec.name) << " " << claim.id);
      const ClaimOutcome out = claim.check(fx);
      INFO(out.detail);
      CHECK(out.passed);
      CHECK_FALSE(claim.anchor.empty());
    }
  }
}

TEST_CASE("claims notice a broken space", "[fixtures][claims]") {
  Fixture fx = generate(make(FixtureName::segment_chain, 12, 2));
  fx.space = scaled_space(fx.space, 1.1);
  const auto claims = canonical_claims(fx.spec);
  const auto half = std::find_if(claims.begin(), claims.end(), [](const Claim& c) { return c.id == "distance-half"; });
  REQUIRE(half != claims.end());
  CHECK_FALSE(half->check(fx).passed);
}
