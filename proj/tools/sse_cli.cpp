#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sse/benchmarks.hpp"
#include "sse/csv.hpp"
#include "sse/error.hpp"
#include "sse/run_config.hpp"
#include "sse/sensitivity.hpp"
#include "sse/serialization.hpp"

namespace {

std::string pick(const std::string& flag, const std::string& from_config, const char* what) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  throw sse::Error(std::string("missing ") + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sse::Error("cannot open '" + path + "' for writing");
  return out;
}

int cmd_train(const std::string& config_path, std::string design, std::string out_path,
              std::optional<std::uint64_t> seed) {
  const sse::RunConfig cfg = sse::load_run_config(config_path);
  design = pick(design, cfg.design_path, "design CSV (--design)");
  out_path = pick(out_path, cfg.model_path, "output model path (--out)");

  const sse::CsvTable table = sse::read_csv_file(design);
  const int ycol = table.column("y");
  if (ycol < 0 || ycol != static_cast<int>(table.header.size()) - 1) {
    throw sse::Error("design CSV must end with a 'y' column");
  }
  const auto m = static_cast<std::size_t>(ycol);
  const sse::InputModel input = cfg.input ? *cfg.input : sse::unit_cube_input(m);
  if (input.dim() != m) {
    throw sse::Error("dimension mismatch: config declares " + std::to_string(input.dim()) +
                     " inputs, design has " + std::to_string(m));
  }
  sse::SseConfig sc = cfg.sse;
  if (seed) sc.seed = *seed;
  const Eigen::MatrixXd x = table.data.leftCols(static_cast<Eigen::Index>(m));
  const Eigen::VectorXd y = table.data.col(ycol);
  const sse::SseModel model = sse::train(input, x, y, sc);
  sse::save_model(model, out_path);
  std::cout << "eps_gen_hat=" << sse::format_double(sse::gen_error_estimate(model).relative) << '\n';
  std::cout << "depth=" << model.depth() << '\n';
  std::cout << "expansions=" << model.expansion_count() << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& points, const std::string& out_path) {
  const sse::SseModel model = sse::load_model(model_path);
  sse::CsvTable table = sse::read_csv_file(points);
  if (table.header.size() != model.dim()) {
    throw sse::Error("dimension mismatch: model has " + std::to_string(model.dim()) + " inputs, points have " +
                     std::to_string(table.header.size()) + " columns");
  }
  const Eigen::VectorXd pred = model.predict(table.data);
  table.header.push_back("y_pred");
  table.data.conservativeResize(Eigen::NoChange, table.data.cols() + 1);
  table.data.col(table.data.cols() - 1) = pred;
  auto out = open_out(out_path);
  sse::write_csv(out, table);
  return 0;
}

int cmd_sobol(const std::string& model_path, const std::string& out_path) {
  const sse::SseModel model = sse::load_model(model_path);
  const sse::SobolResult s = sse::first_order_sobol(model.flattened());
  auto out = open_out(out_path);
  out << "variable,partial_variance,sobol_index\n";
  for (std::size_t i = 0; i < model.dim(); ++i) {
    out << model.input_model().names()[i] << ',' << sse::format_double(s.partial_variance[i]) << ','
        << sse::format_double(s.first_order[i]) << '\n';
  }
  return 0;
}

int cmd_benchmark(std::string case_name, const std::string& mode, const std::string& config_path,
                  const std::string& out_dir, std::optional<std::uint64_t> seed) {
  sse::RunConfig cfg;
  if (!config_path.empty()) cfg = sse::load_run_config(config_path);
  case_name = pick(case_name, cfg.bench_case, "benchmark case (--case)");
  const sse::BenchmarkCase bc = sse::make_case(case_name);

  sse::ConvergenceOptions opt;
  if (mode == "paper") {
    opt.sizes = bc.paper_sizes;
    opt.replications = bc.paper_replications;
    opt.n_val = 1000000;
  }
  if (!cfg.sizes.empty()) opt.sizes = cfg.sizes;
  if (cfg.replications) opt.replications = cfg.replications;
  if (cfg.n_val) opt.n_val = cfg.n_val;
  if (cfg.seed_set) opt.seed = cfg.sse.seed;
  if (seed) opt.seed = *seed;

  const auto records = sse::run_convergence(bc, opt);
  const auto rows = sse::summarize(records);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  {
    auto out = open_out((dir / (case_name + "_records.csv")).string());
    sse::write_records_csv(out, records);
  }
  {
    auto out = open_out((dir / (case_name + "_boxplot.csv")).string());
    sse::write_box_csv(out, rows);
  }
  std::vector<sse::ConvergenceRecord> sse_runs;
  std::vector<sse::ConvergenceRecord> pce_runs;
  for (const auto& r : records) (r.method == sse::Method::Sse ? sse_runs : pce_runs).push_back(r);
  auto out = open_out((dir / (case_name + "_summary.txt")).string());
  out << "case=" << case_name << "\nmode=" << mode << "\nseed=" << opt.seed << "\nn_val=" << opt.n_val << '\n';
  for (const auto& b : rows) {
    out << "median_eta[" << sse::to_string(b.method) << ",N=" << b.n << "]=" << sse::format_double(b.stats.median)
        << '\n';
  }
  for (const auto* runs : {&sse_runs, &pce_runs}) {
    if (runs->empty()) continue;
    const auto acc = sse::estimator_accuracy(*runs);
    const std::string m = sse::to_string(runs->front().method);
    out << "pearson_log[" << m << "]=" << sse::format_double(acc.pearson_log) << '\n';
    out << "spearman[" << m << "]=" << sse::format_double(acc.spearman) << '\n';
    out << "underestimation[" << m << "]=" << sse::format_double(acc.underestimation) << '\n';
  }
  std::cout << "records=" << records.size() << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic spectral embedding surrogates"};
  app.require_subcommand(1);

  std::string config, design, model, points, out, case_name, mode = "smoke";
  std::uint64_t seed_value = 0;

  auto* train = app.add_subcommand("train", "Fit an SSE model to a design CSV");
  train->add_option("--config", config, "Run configuration")->required();
  train->add_option("--design", design, "Design CSV (x1..xM,y)");
  train->add_option("--out", out, "Output model JSON");
  auto* train_seed = train->add_option("--seed", seed_value, "Seed override");

  auto* predict = app.add_subcommand("predict", "Evaluate a model on a points CSV");
  predict->add_option("--model", model, "Model JSON")->required();
  predict->add_option("--points", points, "Points CSV")->required();
  predict->add_option("--out", out, "Output CSV")->required();

  auto* sobol = app.add_subcommand("sobol", "First-order Sobol indices of a model");
  sobol->add_option("--model", model, "Model JSON")->required();
  sobol->add_option("--out", out, "Output CSV")->required();

  auto* bench = app.add_subcommand("benchmark", "Convergence study on a built-in case");
  bench->add_option("--case", case_name, "Case name");
  bench->add_option("--mode", mode, "smoke or paper")->check(CLI::IsMember({"smoke", "paper"}));
  bench->add_option("--config", config, "Run configuration");
  bench->add_option("--out", out, "Output directory")->required();
  auto* bench_seed = bench->add_option("--seed", seed_value, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) {
      return cmd_train(config, design, out, *train_seed ? std::optional(seed_value) : std::nullopt);
    }
    if (*predict) return cmd_predict(model, points, out);
    if (*sobol) return cmd_sobol(model, out);
    if (*bench) {
      return cmd_benchmark(case_name, mode, config, out, *bench_seed ? std::optional(seed_value) : std::nullopt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
