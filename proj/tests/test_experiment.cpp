#include <cstdlib>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "msd/experiment.hpp"
#include "msd/report.hpp"

namespace {

msd::ExperimentConfig cost_cfg() {
  return msd::parse_config(msd::default_config("cost_tables"));
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing") {
  msd::json j;
  j["experiment"] = "cost_tables";
  j["seed"] = 99;
  j["trials"] = 2;
  j["scale"] = "desk";
  const auto cfg = msd::parse_config(j);
  CHECK(cfg.experiment == "cost_tables");
  CHECK(cfg.seed == 99);
  CHECK(cfg.trials == 2);
  CHECK(cfg.scale == "desk");

  msd::json bad = j;
  bad["experiment"] = "no_such_experiment";
  CHECK_THROWS_AS(msd::parse_config(bad), std::invalid_argument);
  bad = j;
  bad["trials"] = 0;
  CHECK_THROWS_AS(msd::parse_config(bad), std::invalid_argument);
}

TEST_CASE("seed environment override") {
  msd::json j;
  j["experiment"] = "cost_tables";
  j["seed"] = 7;
  setenv("MSD_SEED", "4242", 1);
  const auto cfg = msd::parse_config(j);
  unsetenv("MSD_SEED");
  CHECK(cfg.seed == 4242);
  const auto cfg2 = msd::parse_config(j);
  CHECK(cfg2.seed == 7);
}

TEST_CASE("every experiment id has a canonical config") {
  for (const auto& id : msd::experiment_ids()) {
    const msd::json j = msd::default_config(id);
    const auto cfg = msd::parse_config(j);
    CHECK(cfg.experiment == id);
  }
  CHECK_THROWS_AS(msd::default_config("bogus"), std::invalid_argument);
}

TEST_CASE("cost tables run and pass their checks") {
  const auto cfg = cost_cfg();
  const auto recs = msd::run_experiment(cfg);
  CHECK(!recs.empty());
  for (const auto& c : msd::check_results(cfg, recs)) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.pass);
  }
}

TEST_CASE("csv output follows RFC 4180") {
  const auto recs = msd::run_experiment(cost_cfg());
  const std::string csv = msd::emit_csv(recs);
  CHECK(csv.find("\r\n") != std::string::npos);
  // Every line terminates with CRLF, never a bare LF.
  for (std::size_t p = csv.find('\n'); p != std::string::npos;
       p = csv.find('\n', p + 1)) {
    CHECK(csv[p - 1] == '\r');
  }
  CHECK(csv.back() == '\n');

  // Fields containing commas or quotes are quoted and quote-doubled.
  std::vector<msd::ResultRecord> quoted(1);
  quoted[0].experiment = "cost_tables";
  quoted[0].config = msd::json{{"label", "a,b \"c\""}};
  quoted[0].values = msd::json{{"v", 1.0}};
  const std::string q = msd::emit_csv(quoted);
  CHECK(q.find("\"a,b \"\"c\"\"\"") != std::string::npos);
}

TEST_CASE("json round trip preserves records") {
  const auto recs = msd::run_experiment(cost_cfg());
  const auto back = msd::records_from_json(msd::emit_json(recs));
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].experiment == recs[i].experiment);
    CHECK(back[i].config == recs[i].config);
    CHECK(back[i].values == recs[i].values);
  }
}

TEST_CASE("empty record sets are rejected") {
  const std::vector<msd::ResultRecord> none;
  CHECK_THROWS_WITH_AS(msd::emit_csv(none), "empty record set",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(msd::emit_markdown(none), "empty record set",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(msd::emit_json(none), "empty record set",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(msd::emit_chart_svg(none, {}), "empty record set",
                       std::invalid_argument);
}

TEST_CASE("svg output is well formed and deterministic") {
  std::vector<msd::ResultRecord> recs(1);
  recs[0].experiment = "size_sweep";
  recs[0].config = msd::json{{"size", 1024}, {"method", "msd"}};
  recs[0].values = msd::json{{"l2_rel", 3.0e-5}};
  msd::ChartSpec spec;
  spec.title = "single point";
  const std::string a = msd::emit_chart_svg(recs, spec);
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(a == msd::emit_chart_svg(recs, spec));
}

TEST_CASE("experiment runs are byte-identical") {
  const auto cfg = cost_cfg();
  const auto a = msd::emit_json(msd::run_experiment(cfg)).dump();
  const auto b = msd::emit_json(msd::run_experiment(cfg)).dump();
  CHECK(a == b);
}

}  // TEST_SUITE
