#include <doctest.h>

#include <sstream>
#include <string>

#include "econet/config.hpp"
#include "econet/error.hpp"
#include "econet/io.hpp"

using namespace econet;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config applies every default") {
  const auto c = parse_config_text("L = 1500\nc_th = -0.71\n");
  ExperimentConfig expected;
  expected.run.dynamics.agents = 1500;
  expected.run.dynamics.c_th = -0.71;
  CHECK(c == expected);
  CHECK(c.run.total_steps == 1'500'000);
  CHECK(c.run.transient == 100'000);
  CHECK(c.run.replicas == 8);
  CHECK(c.run.dynamics.smoothing == 1.0);
  CHECK(c.run.measure.window == 10'000);
  CHECK(c.search.rel_tol == 0.02);
}

TEST_CASE("comments, spacing and lists") {
  const auto c = parse_config_text(
      "# scenario\n"
      "  L=800   # inline\n"
      "dynamics.mode = uniform\n"
      "sweep.L_values = 500,1000 , 1500\n"
      "sweep.c_th_values = -0.72, -0.7\n"
      "\n"
      "run.seed = 18446744073709551615\n");
  CHECK(c.run.dynamics.agents == 800);
  CHECK(c.run.dynamics.mode == GrowthMode::uniform);
  CHECK(c.sweep_agents == std::vector<std::uint32_t>{500, 1000, 1500});
  CHECK(c.sweep_c_th == std::vector<double>{-0.72, -0.7});
  CHECK(c.run.seed == 18446744073709551615ULL);
}

TEST_CASE("configuration errors carry context") {
  CHECK(error_of("c_th = 0.5\n").find("c_th must lie in (-1, 0)") != std::string::npos);
  CHECK(error_of("L = 10\nbogus = 1\n").find("line 2: unknown key 'bogus'") != std::string::npos);
  CHECK(error_of("L = 10\nL = 11\n").find("duplicate key 'L'") != std::string::npos);
  CHECK(error_of("L = ten\n").find("line 1: L: cannot parse 'ten'") != std::string::npos);
  CHECK(error_of("L = -5\n").find("cannot parse") != std::string::npos);
  CHECK(error_of("just words\n").find("expected 'key = value'") != std::string::npos);
  CHECK(error_of("run.transient = 2000000\n").find("run.transient") != std::string::npos);
  CHECK(error_of("dynamics.mode = random\n").find("dynamics.mode") != std::string::npos);
  CHECK(error_of("search.L_min = 3000\n").find("search bracket") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/econet.cfg"), ConfigError);
}

TEST_CASE("emit then parse is the identity") {
  ExperimentConfig c;
  c.run.dynamics.agents = 1234;
  c.run.dynamics.c_th = -0.1 - 0.2 - 0.4;  // not a short decimal
  c.run.dynamics.smoothing = 1.0 / 3.0;
  c.run.dynamics.mode = GrowthMode::uniform;
  c.run.seed = 0xDEADBEEFCAFEF00DULL;
  c.run.total_steps = 777777;
  c.run.transient = 7;
  c.run.replicas = 3;
  c.run.audit_every = 0;
  c.run.measure = {333, 9};
  c.sweep_agents = {2, 3, 5};
  c.sweep_c_th = {-0.999, -1e-9};
  c.scenario_c_th_final = -0.123456789012345678;
  c.search = {10, 20, 0.0125, 4, 2};
  const auto text = emit_config(c);
  const auto back = parse_config_text(text);
  CHECK(back == c);
  CHECK(emit_config(back) == text);
  CHECK(config_hash(back) == config_hash(c));

  auto other = c;
  other.run.seed += 1;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(config_hash(c).size() == 16);

  const ExperimentConfig defaults;
  CHECK(parse_config_text(emit_config(defaults)) == defaults);
}

TEST_CASE("avalanche log and csv round-trip through read_sizes") {
  const std::vector<AvalancheSummary> log{{101, 5, 1, 1}, {150, 42, 3, 2}, {999, 1, 1, 1}};
  const Provenance prov{"0123456789abcdef", 7};
  std::stringstream jsonl;
  write_avalanches_jsonl(jsonl, log, prov);
  CHECK(jsonl.str() ==
        "# config_hash=0123456789abcdef master_seed=7\n"
        "{\"t\":101,\"size\":5,\"n_agents\":1,\"generations\":1}\n"
        "{\"t\":150,\"size\":42,\"n_agents\":3,\"generations\":2}\n"
        "{\"t\":999,\"size\":1,\"n_agents\":1,\"generations\":1}\n");
  CHECK(read_sizes(jsonl) == std::vector<std::uint64_t>{5, 42, 1});

  std::stringstream csv("# note\nt,size\n1,3\n2,4\n");
  CHECK(read_sizes(csv) == std::vector<std::uint64_t>{3, 4});
  std::stringstream bare("7\n8\r\n\n9\n");
  CHECK(read_sizes(bare) == std::vector<std::uint64_t>{7, 8, 9});
  std::stringstream bad("size\nx\n");
  CHECK_THROWS_AS(read_sizes(bad), StatsError);
  std::stringstream nocol("a,b\n1,2\n");
  CHECK_THROWS_AS(read_sizes(nocol), StatsError);
}

TEST_CASE("surface, ccdf and fit documents") {
  SweepSurface s;
  SurfaceCell ok;
  ok.agents = 500;
  ok.c_th = -0.72;
  ok.m_ccdf = 1.5;
  ok.m_err = 0.25;
  ok.omega_mean = -0.125;
  ok.n_tail = 40;
  ok.ran = ok.ok = true;
  SurfaceCell unfit = ok;
  unfit.ok = false;
  unfit.c_th = -0.7;
  SurfaceCell failed;
  failed.agents = 1000;
  failed.c_th = -0.67;
  s.grid = {ok, unfit, failed};
  std::ostringstream os;
  write_surface_csv(os, s, {"ab", 1});
  CHECK(os.str() ==
        "# config_hash=ab master_seed=1\n"
        "L,c_th,m_ccdf,m_err,omega_mean,n_tail\n"
        "500,-0.72,1.5,0.25,-0.125,40\n"
        "500,-0.7,,,-0.125,\n"
        "1000,-0.67,,,,\n");

  const std::vector<CcdfPoint> pts{{1, 0.5}, {3, 0.0}};
  std::ostringstream cc;
  write_ccdf_csv(cc, pts, {"ab", 1});
  CHECK(cc.str() == "# config_hash=ab master_seed=1\ns,pc\n1,0.5\n3,0\n");

  TailFit f{3.0, 2.0, 0.1, 12, 0.05, 400};
  const auto j = fit_document(f, "", {"ab", 1});
  CHECK(j.dump() ==
        "{\"m_density\":3.0,\"m_ccdf\":2.0,\"m_err\":0.1,\"s_min\":12,\"ks\":0.05,\"n_tail\":400,"
        "\"config_hash\":\"ab\",\"master_seed\":1}");
  const auto none = fit_document(std::nullopt, "insufficient tail", {"ab", 1});
  CHECK(none["fit"].is_null());
  CHECK(none["warning"] == "insufficient tail");
}
