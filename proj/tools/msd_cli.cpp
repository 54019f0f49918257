#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "msd/cost_model.hpp"
#include "msd/experiment.hpp"
#include "msd/report.hpp"

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_outputs(const std::vector<msd::ResultRecord>& recs,
                   const fs::path& dir, const std::string& stem) {
  fs::create_directories(dir);
  write_file(dir / (stem + ".csv"), msd::emit_csv(recs));
  write_file(dir / (stem + ".md"), msd::emit_markdown(recs));
  write_file(dir / (stem + ".json"), msd::emit_json(recs).dump(2) + "\n");
}

int report_checks(const std::vector<msd::CheckOutcome>& checks) {
  int failures = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    if (!c.pass) ++failures;
  }
  return failures;
}

int run_one(const msd::ExperimentConfig& cfg, const fs::path& out_dir,
            bool check) {
  const auto recs = msd::run_experiment(cfg);
  write_outputs(recs, out_dir, cfg.experiment);
  std::cout << cfg.experiment << ": " << recs.size() << " records -> "
            << (out_dir / cfg.experiment).string() << ".{csv,md,json}\n";
  if (!check) return 0;
  return report_checks(msd::check_results(cfg, recs)) == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activation-decomposition simulation suite"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::string scale = "full";
  bool check = false;

  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_flag("--check", check, "compare results against tolerance bands");

  auto* run_all = app.add_subcommand("run-all", "Run the full experiment suite");
  run_all->add_option("--out-dir", out_dir, "output directory");
  run_all->add_flag("--check", check, "compare results against tolerance bands");
  run_all->add_option("--scale", scale, "full or desk")
      ->check(CLI::IsMember({"full", "desk"}));

  auto* cost = app.add_subcommand("cost", "Evaluate the closed-form cost models");
  std::int64_t cn = 1, cm = 8192, cd = 128, cbc = 64, cb = 8;
  auto* cost_attn = cost->add_subcommand("attn", "attention decode vector ops");
  cost_attn->add_option("-N,--queries", cn);
  cost_attn->add_option("-M,--kv-length", cm);
  cost_attn->add_option("-d,--head-dim", cd);
  cost_attn->add_option("-B,--tile", cbc);
  auto* cost_linear = cost->add_subcommand("linear", "linear-layer HBM traffic");
  cost_linear->add_option("-b,--batch", cb);
  cost_linear->add_option("-m,--out-dim", cm);
  cost_linear->add_option("-n,--in-dim", cn);
  cost->require_subcommand(1);

  auto* verify = app.add_subcommand("verify-bounds", "Reconstruction bound check");
  std::int64_t samples = 1000000;
  verify->add_option("--samples", samples, "approximate vector count");

  auto* chart = app.add_subcommand("chart", "Render a results JSON as SVG");
  std::string results_path, chart_out = "chart.svg";
  msd::ChartSpec spec;
  bool linear_y = false;
  chart->add_option("results", results_path, "results JSON file")->required();
  chart->add_option("--out", chart_out, "output SVG path");
  chart->add_option("--kind", spec.kind)->check(CLI::IsMember({"line", "bar"}));
  chart->add_option("--x", spec.x_key, "config key for the x axis");
  chart->add_option("--y", spec.y_key, "value key for the y axis");
  chart->add_option("--series", spec.series_key, "series key");
  chart->add_option("--title", spec.title);
  chart->add_flag("--linear-y", linear_y, "disable the log y axis");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_one(msd::load_config(config_path), out_dir, check);
    }
    if (run_all->parsed()) {
      int rc = 0;
      for (const auto& id : msd::experiment_ids()) {
        msd::json j = msd::default_config(id);
        j["scale"] = scale;
        const int one = run_one(msd::parse_config(j), out_dir, check);
        rc = std::max(rc, one);
      }
      return rc;
    }
    if (cost->parsed()) {
      if (cost_attn->parsed()) {
        const msd::AttnCostInput in{cn, cm, cd, cbc};
        const auto cross = msd::attn_crossover(cm, cd, cbc);
        std::cout << "dequant_vector_ops: "
                  << msd::attn_vector_ops(in, msd::AttnMethod::dequant) << "\n"
                  << "msd_vector_ops: "
                  << msd::attn_vector_ops(in, msd::AttnMethod::msd) << "\n"
                  << "crossover_approx: " << cross.approx << "\n"
                  << "crossover_exact: " << cross.exact << "\n"
                  << "hbm_dequant_bytes: "
                  << msd::attn_hbm_traffic(cm, cd, msd::AttnMethod::dequant) << "\n"
                  << "hbm_msd_bytes: "
                  << msd::attn_hbm_traffic(cm, cd, msd::AttnMethod::msd) << "\n";
      } else {
        const msd::LinearCostInput in{cb, cm, cn};
        using M = msd::LinearTrafficMethod;
        for (const auto& [name, m] :
             {std::pair<const char*, M>{"dequant", M::dequant},
              {"msd_resident", M::msd_resident},
              {"msd_conservative", M::msd_conservative},
              {"bf16", M::bf16}}) {
          const auto t = msd::linear_hbm_traffic(in, m);
          std::cout << name << "_bytes: " << t.bytes
                    << " (dominant ratio vs dequant "
                    << t.dominant_ratio_vs_dequant << ")\n";
        }
      }
      return 0;
    }
    if (verify->parsed()) {
      msd::json j = msd::default_config("bound_verify");
      const double f =
          static_cast<double>(samples) / 1000000.0;  // defaults target 1e6
      j["params"]["counts"] = std::vector<int>{
          std::max(1, static_cast<int>(125000 * f)),
          std::max(1, static_cast<int>(15000 * f)),
          std::max(1, static_cast<int>(4000 * f)),
          std::max(1, static_cast<int>(1000 * f))};
      j["params"]["blocks"] = std::max(1000, static_cast<int>(100000 * f));
      const auto cfg = msd::parse_config(j);
      const auto recs = msd::run_experiment(cfg);
      const int failures = report_checks(msd::check_results(cfg, recs));
      return failures == 0 ? 0 : 2;
    }
    if (chart->parsed()) {
      spec.log_y = !linear_y;
      std::ifstream in(results_path);
      if (!in) throw std::invalid_argument("cannot open " + results_path);
      msd::json doc;
      in >> doc;
      write_file(chart_out, msd::emit_chart_svg(msd::records_from_json(doc), spec));
      std::cout << "wrote " << chart_out << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
