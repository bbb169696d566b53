// chainscope: JSON front end for the chainscope library.
//
// Exit codes: 0 success, 1 a verified claim or property failed, 2 usage or
// input error.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainscope/chainscope.hpp"
#include "chainscope/io.hpp"

namespace cs = chainscope;
using cs::io::json;
using cs::io::number;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitClaimFailed = 1;
constexpr int kExitInput = 2;

struct SpaceArgs {
  std::string matrix;
  std::string points;
  std::string fixture;
  std::size_t n = 10;
  std::size_t subdiv = 1;
  std::string variant;
  double grid = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  double height = 1.0;
  double tol = cs::kDefaultTol;
};

void add_space_options(CLI::App& cmd, SpaceArgs& a) {
  auto* matrix = cmd.add_option("--matrix", a.matrix, "CSV distance matrix")->check(CLI::ExistingFile);
  auto* points = cmd.add_option("--points", a.points, "JSONL point file")->check(CLI::ExistingFile);
  auto* fixture = cmd.add_option("--fixture", a.fixture, "Named example space");
  matrix->excludes(points, fixture);
  points->excludes(fixture);
  cmd.add_option("--n", a.n, "Fixture size")->check(CLI::PositiveNumber);
  cmd.add_option("--subdiv", a.subdiv, "Fixture subdivision")->check(CLI::PositiveNumber);
  cmd.add_option("--variant", a.variant, "Fixture variant");
  cmd.add_option("--grid", a.grid, "Fixture grid parameter");
  cmd.add_option("--lo", a.lo, "grid-interval lower end");
  cmd.add_option("--hi", a.hi, "grid-interval upper end");
  cmd.add_option("--height", a.height, "slow-spike-grid spike height");
  cmd.add_option("--tol", a.tol, "Metric validation tolerance")->check(CLI::NonNegativeNumber);
}

cs::FixtureSpec fixture_spec(const SpaceArgs& a) {
  cs::FixtureSpec spec;
  spec.name = cs::parse_fixture_name(a.fixture);
  spec.n = a.n;
  spec.subdiv = a.subdiv;
  spec.variant = a.variant;
  spec.grid = a.grid;
  spec.lo = a.lo;
  spec.hi = a.hi;
  spec.height = a.height;
  return spec;
}

/// A loaded space, optionally with the fixture it came from.
struct Loaded {
  std::optional<cs::Fixture> fixture;
  std::optional<cs::MetricSpace> plain;

  const cs::MetricSpace& space() const { return fixture ? fixture->space : *plain; }
};

Loaded load(const SpaceArgs& a) {
  const int sources = !a.matrix.empty() + !a.points.empty() + !a.fixture.empty();
  if (sources != 1) throw cs::Error(cs::Errc::malformed_input, "give exactly one of --matrix, --points, --fixture");
  Loaded out;
  if (!a.matrix.empty()) out.plain = cs::io::read_matrix_csv(a.matrix, a.tol);
  if (!a.points.empty()) out.plain = cs::io::read_points_jsonl(a.points, a.tol);
  if (!a.fixture.empty()) out.fixture = cs::generate(fixture_spec(a));
  return out;
}

/// A point given as an index or a fixture label such as e8.
std::size_t resolve_point(const Loaded& l, const std::string& ref) {
  if (!ref.empty() && std::all_of(ref.begin(), ref.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const std::size_t i = std::stoul(ref);
    l.space().check_index(i);
    return i;
  }
  if (l.fixture) return l.fixture->label(ref);
  throw cs::Error(cs::Errc::bad_param, "'" + ref + "' is neither an index nor a fixture label");
}

json echo_inputs(const CLI::App& cmd) {
  json out = json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    const auto& results = opt->results();
    if (results.empty()) {
      out[key] = true;
    } else if (results.size() == 1) {
      out[key] = results.front();
    } else {
      out[key] = results;
    }
  }
  return out;
}

json space_summary(const cs::MetricSpace& X) {
  double lo = cs::kInfinity, hi = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double iso = cs::isolation(X, i);
    lo = std::min(lo, iso);
    hi = std::max(hi, iso);
    sum += iso;
  }
  return {{"n", X.size()},
          {"provider", cs::provider_name(X.provider())},
          {"param", X.provider_param()},
          {"diameter", X.diameter()},
          {"min_positive_distance", number(X.min_positive_distance())},
          {"isolation", {{"min", number(lo)}, {"max", number(hi)}, {"mean", number(sum / static_cast<double>(X.size()))}}}};
}

// ---- space -----------------------------------------------------------------

json cmd_space(const SpaceArgs& a) {
  const Loaded l = load(a);
  json out = space_summary(l.space());
  if (l.fixture) {
    out["prefix_length"] = l.fixture->prefix.size();
    out["has_function"] = l.fixture->function.has_value();
    out["family_size"] = l.fixture->family.size();
  }
  return out;
}

// ---- chains ----------------------------------------------------------------

struct ChainArgs {
  std::vector<double> eps;
  std::vector<double> eps_geom;
  std::vector<std::string> ball;
  std::vector<std::string> witness;
  bool profile = false;
  std::string subset;
  bool discreteness = false;
  std::string mode = "ambient";
};

std::vector<double> scales(const ChainArgs& c) {
  std::vector<double> out = c.eps;
  if (!c.eps_geom.empty()) {
    if (c.eps_geom[2] < 1 || c.eps_geom[2] != std::floor(c.eps_geom[2]))
      throw cs::Error(cs::Errc::bad_param, "--eps-geom COUNT must be a positive integer");
    double e = c.eps_geom[0];
    for (int k = 0; k < static_cast<int>(c.eps_geom[2]); ++k, e *= c.eps_geom[1]) out.push_back(e);
  }
  if (out.empty()) throw cs::Error(cs::Errc::bad_param, "give --eps or --eps-geom");
  for (double e : out) cs::detail::require_positive_eps(e);
  return out;
}

json cmd_chains(const SpaceArgs& a, const ChainArgs& c) {
  const Loaded l = load(a);
  const cs::MetricSpace& X = l.space();
  std::vector<std::size_t> subset;
  if (c.discreteness) {
    if (c.subset.empty()) throw cs::Error(cs::Errc::bad_param, "--discreteness needs --subset FILE");
    subset = cs::io::prefix_from_json(cs::io::read_json_file(c.subset));
  }
  json rows = json::array();
  for (double eps : scales(c)) {
    const cs::ChainGraph g(X, eps);
    json row{{"eps", eps}, {"components", g.component_count()}};
    if (!c.ball.empty()) {
      const std::size_t x = resolve_point(l, c.ball[0]);
      const std::size_t m = std::stoul(c.ball[1]);
      row["ball"] = {{"center", x}, {"m", m}, {"members", cs::ball_layers(g, x, m)}};
    }
    if (!c.witness.empty()) {
      const std::size_t x = resolve_point(l, c.witness[0]);
      const std::size_t y = resolve_point(l, c.witness[1]);
      const auto w = cs::find_chain(g, x, y);
      row["witness"] = w ? json{{"from", x}, {"to", y}, {"length", w->length()}, {"chain", w->indices}}
                         : json{{"from", x}, {"to", y}, {"length", nullptr}};
    }
    if (c.profile) {
      const cs::CoveringProfile p = cs::covering_profile(g);
      row["profile"] = {{"k", p.components}, {"m_star", p.m_star}, {"centers", p.centers}};
    }
    if (c.discreteness) {
      const auto mode = c.mode == "itself" ? cs::DiscretenessMode::in_itself : cs::DiscretenessMode::in_ambient;
      row["uniformly_chain_discrete"] = cs::uniformly_chain_discrete_at(X, subset, mode, eps);
    }
    rows.push_back(std::move(row));
  }
  json out{{"scales", rows}};
  if (c.discreteness) {
    const auto mode = c.mode == "itself" ? cs::DiscretenessMode::in_itself : cs::DiscretenessMode::in_ambient;
    const cs::ChainDiscreteness d = cs::chain_discreteness(
        X, subset, mode, {cs::ThresholdScan::Kind::exact_breakpoints});
    json th = json::array();
    for (double t : d.thresholds) th.push_back(number(t));
    out["discreteness"] = {{"mode", c.mode}, {"thresholds", th}, {"uniform", number(d.uniform)}};
  }
  return out;
}

// ---- seq -------------------------------------------------------------------

struct SeqArgs {
  std::string prefix;
  std::string test = "qc";
  std::string schedule;
  bool splice = false;
  bool extract = false;
};

std::vector<std::size_t> prefix_or_canonical(const Loaded& l, const std::string& file) {
  if (!file.empty()) return cs::io::prefix_from_json(cs::io::read_json_file(file));
  if (l.fixture && !l.fixture->prefix.empty()) return l.fixture->prefix;
  throw cs::Error(cs::Errc::bad_param, "give --prefix FILE (the space has no canonical prefix)");
}

cs::ToleranceSchedule schedule_or_default(const cs::MetricSpace& X, std::size_t length, const std::string& file) {
  if (!file.empty()) return cs::io::schedule_from_json(cs::io::read_json_file(file));
  return cs::ToleranceSchedule::default_for(X.diameter(), length);
}

json cmd_seq(const SpaceArgs& a, const SeqArgs& s) {
  const Loaded l = load(a);
  const cs::MetricSpace& X = l.space();
  const cs::SequencePrefix prefix(X, prefix_or_canonical(l, s.prefix));
  const cs::ToleranceSchedule schedule = schedule_or_default(X, prefix.size(), s.schedule);
  json out{{"length", prefix.size()}, {"schedule", cs::io::schedule_to_json(schedule)}};
  if (s.test == "qc") out["verdict"] = cs::io::verdict_to_json(cs::quasi_cauchy_test(prefix, schedule));
  if (s.test == "cauchy") out["verdict"] = cs::io::verdict_to_json(cs::cauchy_test(prefix, schedule));
  if (s.test == "pseudo") out["verdict"] = cs::io::verdict_to_json(cs::pseudo_cauchy_test(prefix, schedule));
  if (s.test == "bqc") {
    json stages = json::array();
    bool all = true;
    for (const cs::Stage& st : schedule.stages()) {
      const cs::BourbakiQcResult r = cs::bourbaki_qc_test(prefix, st.eps);
      all = all && r.consistent;
      stages.push_back({{"eps", st.eps}, {"consistent", r.consistent}, {"n0", r.n0}, {"center", r.center}});
    }
    out["verdict"] = {{"status", all ? "consistent" : "falsified"}, {"stages", stages}};
  }
  if (s.splice) {
    const cs::SpliceResult r = cs::splice_to_quasi_cauchy(prefix, schedule);
    out["splice"] = {{"prefix", std::vector<std::size_t>(r.spliced.indices().begin(), r.spliced.indices().end())},
                     {"embedding", r.embedding},
                     {"schedule", cs::io::schedule_to_json(r.derived)}};
  }
  if (s.extract) {
    const cs::ExtractResult r = cs::extract_bqc_subsequence(prefix, schedule);
    json stages = json::array();
    for (const cs::StageCensus& c : r.stages)
      stages.push_back({{"eps", c.eps}, {"component", c.component}, {"survivors", c.survivors}, {"emitted", c.emitted}});
    out["extract"] = {{"positions", r.positions}, {"stages", stages}, {"exhausted", r.exhausted}};
  }
  return out;
}

// ---- approx ----------------------------------------------------------------

struct ApproxArgs {
  std::string function;
  bool canonical = false;
  double eps = 0.0;
  std::string bounds_prefix;
  bool bounds_canonical = false;
  std::string schedule;
};

json cmd_approx(const SpaceArgs& a, const ApproxArgs& p) {
  const Loaded l = load(a);
  const cs::MetricSpace& X = l.space();
  std::vector<double> values;
  if (!p.function.empty()) {
    values = cs::io::function_from_json(cs::io::read_json_file(p.function));
  } else if (p.canonical && l.fixture && l.fixture->function) {
    values = *l.fixture->function;
  } else {
    throw cs::Error(cs::Errc::bad_param, "give --function FILE or --canonical on a fixture with a function");
  }
  const cs::ScalarFunction f(X, std::move(values));
  const cs::LevelDecomposition d = cs::approximate(f, p.eps);
  json out = cs::io::decomposition_to_json(d);
  json warnings = json::array();
  if (!p.bounds_prefix.empty() || p.bounds_canonical) {
    const cs::SequencePrefix prefix(X, prefix_or_canonical(l, p.bounds_prefix));
    const cs::ToleranceSchedule schedule = schedule_or_default(X, prefix.size(), p.schedule);
    const cs::ProofBounds b = cs::proof_bounds_report(d, prefix, schedule);
    json violations = json::array();
    for (const cs::BoundViolation& v : b.violations)
      violations.push_back({{"position", v.position}, {"bound", v.bound}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    out["bounds"] = {{"delta", b.delta},
                     {"tail_start", b.tail_start},
                     {"checked", b.checked},
                     {"max_tail_gap", b.max_tail_gap},
                     {"max_final_gap", b.max_final_gap},
                     {"g_margin", number(b.g_margin)},
                     {"h_margin", number(b.h_margin)},
                     {"g_constant", b.g_constant},
                     {"h_constant", b.h_constant},
                     {"holds", b.holds()},
                     {"violations", violations}};
    if (b.no_valid_delta) warnings.push_back("NoValidDelta");
  }
  out["warnings"] = warnings;
  return out;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  bool all = false;
  std::string fixture;
  std::uint64_t seed = 7;
  std::size_t trials = 100;
  std::string mutate = "none";
};

json cmd_verify(const VerifyArgs& v, bool& failed) {
  if (v.all == !v.fixture.empty()) throw cs::Error(cs::Errc::bad_param, "give exactly one of --all, --fixture NAME");
  std::optional<cs::FixtureName> only;
  if (!v.fixture.empty()) only = cs::parse_fixture_name(v.fixture);

  json claims = json::array();
  for (const cs::FixtureSpec& spec : cs::verification_specs()) {
    if (only && spec.name != *only) continue;
    cs::Fixture fx = cs::generate(spec);
    if (v.mutate == "distance") fx.space = cs::scaled_space(fx.space, 1.1);
    for (const cs::Claim& claim : cs::canonical_claims(spec)) {
      cs::ClaimOutcome outcome;
      try {
        outcome = claim.check(fx);
      } catch (const cs::Error& e) {
        outcome = {false, e.what()};
      }
      failed = failed || !outcome.passed;
      claims.push_back({{"fixture", cs::fixture_name(spec.name)},
                        {"n", spec.n},
                        {"claim", claim.id},
                        {"anchor", claim.anchor},
                        {"passed", outcome.passed},
                        {"detail", outcome.detail}});
      std::cerr << (outcome.passed ? "PASS " : "FAIL ") << cs::fixture_name(spec.name) << " n=" << spec.n << " "
                << claim.id << ": " << claim.anchor << "\n";
    }
  }
  json out{{"claims", claims}};
  if (v.all) {
    const auto mutation = v.mutate == "comparator" ? cs::Mutation::comparator : cs::Mutation::none;
    const cs::SuiteReport r = cs::implication_suite(v.trials, v.seed, mutation);
    json failures = json::array();
    for (const cs::SuiteFailure& f : r.failures)
      failures.push_back({{"trial", f.trial}, {"property", f.property}, {"detail", f.detail},
                          {"shrunk_points", f.points}, {"shrunk_prefix", f.prefix}});
    std::size_t checks = 0;
    for (const cs::TrialRecord& t : r.records) checks += t.checks;
    out["implications"] = {{"trials", r.trials}, {"seed", v.seed}, {"checks", checks}, {"failures", failures}};
    failed = failed || !r.clean();
    std::cerr << (r.clean() ? "PASS " : "FAIL ") << "implication suite: " << r.trials << " trials, "
              << r.failures.size() << " violations\n";
  }
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CHAINSCOPE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed CHAINSCOPE_SEED\n";
    }
  }
  return 7;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-scale chain, sequence and modulus analysis of metric spaces"};
  app.require_subcommand(1);
  bool pretty = false;
  bool no_timing = false;
  app.add_flag("--pretty", pretty, "Indent the JSON report");
  app.add_flag("--no-timing", no_timing, "Omit timing from the report")->group("");
  app.set_version_flag("--version", std::string(cs::kVersion));

  SpaceArgs space_args;
  auto* space_cmd = app.add_subcommand("space", "Load or generate a space and summarize it");
  add_space_options(*space_cmd, space_args);

  SpaceArgs chain_space;
  ChainArgs chain_args;
  auto* chains_cmd = app.add_subcommand("chains", "Chain components, balls, witnesses and profiles per scale");
  add_space_options(*chains_cmd, chain_space);
  chains_cmd->add_option("--eps", chain_args.eps, "Scales")->delimiter(',');
  chains_cmd->add_option("--eps-geom", chain_args.eps_geom, "START RATIO COUNT")->expected(3);
  chains_cmd->add_option("--ball", chain_args.ball, "X M: points within m eps-steps of x")->expected(2);
  chains_cmd->add_option("--witness", chain_args.witness, "X Y: shortest eps-chain")->expected(2);
  chains_cmd->add_flag("--profile", chain_args.profile, "Covering profile (k, m_star)");
  chains_cmd->add_option("--subset", chain_args.subset, "JSON index array")->check(CLI::ExistingFile);
  chains_cmd->add_flag("--discreteness", chain_args.discreteness, "Chain-discreteness thresholds of --subset");
  chains_cmd->add_option("--mode", chain_args.mode, "ambient or itself")->check(CLI::IsMember({"ambient", "itself"}));

  SpaceArgs seq_space;
  SeqArgs seq_args;
  auto* seq_cmd = app.add_subcommand("seq", "Classify a sequence prefix; splice or extract");
  add_space_options(*seq_cmd, seq_space);
  seq_cmd->add_option("--prefix", seq_args.prefix, "JSON index array")->check(CLI::ExistingFile);
  seq_cmd->add_option("--test", seq_args.test, "qc, cauchy, pseudo or bqc")
      ->check(CLI::IsMember({"qc", "cauchy", "pseudo", "bqc"}));
  seq_cmd->add_option("--schedule", seq_args.schedule, "JSON [[eps, start], ...]")->check(CLI::ExistingFile);
  seq_cmd->add_flag("--splice", seq_args.splice, "Splice chains into a quasi-Cauchy prefix");
  seq_cmd->add_flag("--extract", seq_args.extract, "Extract a Bourbaki quasi-Cauchy subsequence");

  SpaceArgs approx_space;
  ApproxArgs approx_args;
  auto* approx_cmd = app.add_subcommand("approx", "Level-window approximation and step-bound check");
  add_space_options(*approx_cmd, approx_space);
  auto* fn = approx_cmd->add_option("--function", approx_args.function, "JSON {\"values\": [...]}")
                 ->check(CLI::ExistingFile);
  approx_cmd->add_flag("--canonical", approx_args.canonical, "Use the fixture function")->excludes(fn);
  approx_cmd->add_option("--eps", approx_args.eps, "Window width")->required();
  auto* bp = approx_cmd->add_option("--bounds-prefix", approx_args.bounds_prefix, "Prefix for the bound check")
                 ->check(CLI::ExistingFile);
  approx_cmd->add_flag("--bounds-canonical", approx_args.bounds_canonical, "Check bounds on the canonical prefix")
      ->excludes(bp);
  approx_cmd->add_option("--schedule", approx_args.schedule, "Schedule for the bound check")->check(CLI::ExistingFile);

  VerifyArgs verify_args;
  verify_args.seed = default_seed();
  auto* verify_cmd = app.add_subcommand("verify", "Check fixture claims and the implication suite");
  verify_cmd->add_flag("--all", verify_args.all, "Every fixture plus the implication suite");
  verify_cmd->add_option("--fixture", verify_args.fixture, "Claims of one fixture");
  verify_cmd->add_option("--seed", verify_args.seed, "Suite seed (default $CHAINSCOPE_SEED or 7)");
  verify_cmd->add_option("--trials", verify_args.trials, "Suite trials")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--mutate", verify_args.mutate, "Test-of-the-tester mutation")
      ->check(CLI::IsMember({"none", "distance", "comparator"}))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();
  json report;
  int code = kExitOk;
  try {
    if (*space_cmd) {
      report = {{"command", "space"}, {"inputs", echo_inputs(*space_cmd)}, {"results", cmd_space(space_args)}};
    } else if (*chains_cmd) {
      report = {{"command", "chains"}, {"inputs", echo_inputs(*chains_cmd)},
                {"results", cmd_chains(chain_space, chain_args)}};
    } else if (*seq_cmd) {
      report = {{"command", "seq"}, {"inputs", echo_inputs(*seq_cmd)}, {"results", cmd_seq(seq_space, seq_args)}};
    } else if (*approx_cmd) {
      report = {{"command", "approx"}, {"inputs", echo_inputs(*approx_cmd)},
                {"results", cmd_approx(approx_space, approx_args)}};
    } else if (*verify_cmd) {
      bool failed = false;
      report = {{"command", "verify"}, {"inputs", echo_inputs(*verify_cmd)},
                {"results", cmd_verify(verify_args, failed)}};
      if (failed) code = kExitClaimFailed;
    }
  } catch (const cs::MetricViolation& e) {
    const auto& w = e.witness();
    std::cerr << "error: " << e.what() << "\nwitness: [" << w[0] << ", " << w[1] << ", " << w[2] << "]\n";
    return kExitInput;
  } catch (const cs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  if (!no_timing) report["timing_ms"] = elapsed.count();
  report["version"] = cs::kVersion;
  std::cout << report.dump(pretty ? 2 : -1) << "\n";
  return code;
}
