// Command-line front end: synthetic data generation, partitioning, training,
// prediction, evaluation, and ablation sweeps. All randomness derives from
// the single --seed flag through fixed per-phase streams, so any pipeline
// rerun with the same seed reproduces its outputs byte for byte (wall-clock
// columns aside).
//
// Exit codes: 0 success, 2 usage, 3 missing/unwritable file, 4 invalid
// configuration, 5 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "pcnn/bench.hpp"
#include "pcnn/datagen.hpp"
#include "pcnn/errors.hpp"
#include "pcnn/geometry.hpp"
#include "pcnn/partition.hpp"
#include "pcnn/pcnn_model.hpp"
#include "pcnn/serialize.hpp"

namespace {

using namespace pcnn;

// Seed streams shared with the library trainer (1..3) plus CLI-local ones.
constexpr std::uint64_t kPartitionStream = 1;
constexpr std::uint64_t kSubpatternStream = 2;
constexpr std::uint64_t kDatagenStream = 10;
constexpr std::uint64_t kSplitStream = 11;

struct DataOpts {
  std::string path;
  std::size_t test_last = 0;
  double test_frac = 0.0;
};

struct TrainOpts {
  std::string model = "pcnn";
  std::string mode = "gradient";
  std::string loss = "mae";
  std::string activation = "relu";
  std::size_t epochs = 200;
  std::size_t batch = 64;
  double lr = 1e-3;
  double ridge_lambda = 1e-6;
  std::vector<std::size_t> widths = {64};
  std::vector<std::size_t> cls_widths = {64};
  double q = 0.5;
  double gamma = 0.5;
  std::size_t n_parts = 0;
  std::string routing = "argmax";
};

struct GenOpts {
  SyntheticSpec spec;
  std::string f1 = "exp_cos";
  std::string f2 = "neg_quad_cos";
  std::string out;
};

void add_data_flags(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--data", o.path, "input dataset CSV (x*/y*[/part] columns)")
      ->required();
  cmd->add_option("--test-last", o.test_last, "tag the last K rows as test");
  cmd->add_option("--test-frac", o.test_frac, "tag a random fraction as test");
}

void add_train_flags(CLI::App* cmd, TrainOpts& o) {
  cmd->add_option("--mode", o.mode, "gradient|random_readout")
      ->check(CLI::IsMember({"gradient", "random_readout"}));
  cmd->add_option("--loss", o.loss, "mae|mse|bce")
      ->check(CLI::IsMember({"mae", "mse", "bce"}));
  cmd->add_option("--activation", o.activation, "relu|sigmoid|tanh|identity");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--batch", o.batch, "mini-batch size");
  cmd->add_option("--lr", o.lr, "Adam learning rate");
  cmd->add_option("--ridge-lambda", o.ridge_lambda, "readout ridge penalty");
  cmd->add_option("--widths", o.widths, "subpattern hidden widths")->delimiter(',');
  cmd->add_option("--cls-widths", o.cls_widths, "classifier hidden widths")
      ->delimiter(',');
  cmd->add_option("--q", o.q, "partition stopping fraction in (0,1]");
  cmd->add_option("--gamma", o.gamma, "deep zero-set threshold in (0,1]");
  cmd->add_option("--n-parts", o.n_parts, "requested part count (0 = auto)");
  cmd->add_option("--routing", o.routing, "argmax|paper_literal")
      ->check(CLI::IsMember({"argmax", "paper_literal"}));
}

void add_gen_flags(CLI::App* cmd, GenOpts& o) {
  cmd->add_option("--d", o.spec.d, "input dimension");
  cmd->add_option("--n", o.spec.n, "number of rows");
  cmd->add_option("--sigma", o.spec.sigma, "noise scale");
  cmd->add_option("--nu", o.spec.nu, "Student-t degrees of freedom");
  cmd->add_option("--r", o.spec.r, "discontinuity rate");
  cmd->add_option("--f1", o.f1, "first subpattern");
  cmd->add_option("--f2", o.f2, "second subpattern");
}

Dataset load_data(const DataOpts& o, std::uint64_t seed) {
  if (o.test_last > 0 && o.test_frac > 0.0)
    throw std::invalid_argument("use either --test-last or --test-frac, not both");
  SplitSpec split = SplitSpec::none();
  if (o.test_last > 0) split = SplitSpec::last(o.test_last);
  if (o.test_frac > 0.0)
    split = SplitSpec::fraction(o.test_frac, derive_seed(seed, kSplitStream));
  const CsvLayout layout = infer_csv_layout(o.path);
  return load_csv(o.path, layout.input_cols, layout.target_cols, layout.part_col,
                  split);
}

PcnnTrainConfig to_train_config(const TrainOpts& o, std::uint64_t seed, int jobs) {
  PcnnTrainConfig cfg;
  cfg.subpattern.mode =
      o.mode == "gradient" ? TrainMode::gradient : TrainMode::random_readout;
  cfg.subpattern.activation = activation_from_string(o.activation);
  cfg.subpattern.epochs = o.epochs;
  cfg.subpattern.batch_size = o.batch;
  cfg.subpattern.learning_rate = o.lr;
  cfg.subpattern.ridge_lambda = o.ridge_lambda;
  cfg.subpattern.loss = loss_from_string(o.loss);
  cfg.classifier = cfg.subpattern;
  cfg.classifier.mode = TrainMode::gradient;
  cfg.classifier.loss = Loss::binary_cross_entropy;
  cfg.subpattern_hidden = o.widths;
  cfg.classifier_hidden = o.cls_widths;
  cfg.n_parts_hint = o.n_parts;
  cfg.q = o.q;
  cfg.gamma = o.gamma;
  cfg.routing = routing_from_string(o.routing);
  cfg.jobs = jobs;
  cfg.seed = seed;
  return cfg;
}

int run_gen(GenOpts& o, std::uint64_t seed) {
  o.spec.f1 = subpattern_fn_from_string(o.f1);
  o.spec.f2 = subpattern_fn_from_string(o.f2);
  o.spec.seed = derive_seed(seed, kDatagenStream);
  Rng rng(o.spec.seed);
  const Dataset data = generate(o.spec, rng);
  save_csv(data, o.out);
  std::printf("wrote %zu rows (d=%zu) to %s\n", data.n_rows(), data.input_dim(),
              o.out.c_str());
  return 0;
}

int run_partition(const DataOpts& data_opts, double q, const std::string& out,
                  const std::string& geo_out, std::uint64_t seed) {
  const Dataset data = load_data(data_opts, seed);
  Rng rng(derive_seed(seed, kPartitionStream));
  const PartitionResult result = get_partition(data.inputs, q, rng);
  write_partition_csv(result.partition, out);
  if (!geo_out.empty()) write_geometric_parts_csv(result.geo_parts, geo_out);
  std::printf("partitioned %zu rows into %zu parts (alpha=%.4f, radius=%.6g)\n",
              data.n_rows(), result.partition.n_parts(), result.partition.alpha,
              result.partition.alpha * result.partition.delta_bar);
  return 0;
}

int run_train(const DataOpts& data_opts, const TrainOpts& train_opts,
              const std::string& out, std::uint64_t seed, int jobs) {
  const Dataset data = load_data(data_opts, seed);
  const Dataset train_data = data.train_subset();
  const PcnnTrainConfig cfg = to_train_config(train_opts, seed, jobs);

  AnyModel model;
  std::size_t n_parts = 1;
  if (train_opts.model == "ffnn" || train_opts.model == "ffnn-rnd") {
    std::vector<std::size_t> dims;
    dims.push_back(train_data.input_dim());
    dims.insert(dims.end(), cfg.subpattern_hidden.begin(), cfg.subpattern_hidden.end());
    dims.push_back(train_data.target_dim());
    TrainConfig tc = cfg.subpattern;
    if (train_opts.model == "ffnn-rnd") tc.mode = TrainMode::random_readout;
    tc.seed = derive_seed(derive_seed(seed, kSubpatternStream), 0);
    model = train_ffnn(train_data, tc, dims);
  } else if (train_opts.model == "ffnn-bag" || train_opts.model == "ffnn-lgt") {
    const PartitionResult pr =
        resolve_partition(train_data.inputs, cfg.n_parts_hint, cfg.q,
                          derive_seed(seed, kPartitionStream));
    n_parts = pr.partition.n_parts();
    if (train_opts.model == "ffnn-bag")
      model = build_ffnn_bag(pr.partition, train_data, cfg);
    else
      model = build_ffnn_lgt(pr.partition, train_data, cfg);
  } else if (train_opts.model == "pcnn") {
    PcnnModel m = train_pcnn(data, cfg);
    n_parts = m.n_parts();
    model = std::move(m);
  } else {
    throw std::invalid_argument("unknown --model: " + train_opts.model);
  }

  save_model(model, out);
  std::printf("trained %s on %zu rows (%zu part%s, %zu parameters), saved to %s\n",
              train_opts.model.c_str(), train_data.n_rows(), n_parts,
              n_parts == 1 ? "" : "s", total_parameter_count(model), out.c_str());
  return 0;
}

int run_predict(const std::string& model_path, const DataOpts& data_opts,
                const std::string& out, std::uint64_t seed) {
  const AnyModel model = load_model(model_path);
  const Dataset data = load_data(data_opts, seed);
  const Matrix pred = predict_any(model, data.inputs);
  const auto parts = routed_parts(model, data.inputs);

  std::ofstream file(out);
  if (!file) throw FileError("cannot open for writing: " + out);
  for (std::size_t j = 0; j < pred.cols(); ++j) file << (j ? "," : "") << "yhat" << j;
  file << ",part\n";
  char buf[64];
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    for (std::size_t j = 0; j < pred.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", pred(i, j));
      file << (j ? "," : "") << buf;
    }
    file << "," << parts[i] << "\n";
  }
  if (!file) throw FileError("write failed: " + out);
  std::printf("wrote %zu predictions to %s\n", pred.rows(), out.c_str());
  return 0;
}

int run_eval(const std::string& model_path, const DataOpts& data_opts,
             const std::string& split, const std::string& out, std::uint64_t seed) {
  const AnyModel model = load_model(model_path);
  Dataset data = load_data(data_opts, seed);
  if (split == "train")
    data = data.train_subset();
  else if (split == "test")
    data = data.test_subset();
  else if (split != "all")
    throw std::invalid_argument("--split must be all|train|test");
  if (data.n_rows() == 0) throw std::invalid_argument("selected split is empty");

  const Matrix pred = predict_any(model, data.inputs);
  std::size_t skipped = 0;
  const double mae = metric_mae(pred, data.targets);
  const double mse = metric_mse(pred, data.targets);
  const double mape = metric_mape(pred, data.targets, &skipped);
  std::printf("rows=%zu mae=%.17g mse=%.17g mape=%.17g mape_skipped=%zu\n",
              data.n_rows(), mae, mse, mape, skipped);
  if (!out.empty()) {
    std::ofstream file(out);
    if (!file) throw FileError("cannot open for writing: " + out);
    char buf[256];
    std::snprintf(buf, sizeof buf, "rows,mae,mse,mape,mape_skipped\n%zu,%.17g,%.17g,%.17g,%zu\n",
                  data.n_rows(), mae, mse, mape, skipped);
    file << buf;
  }
  return 0;
}

std::vector<std::pair<std::string, std::vector<double>>> parse_sweeps(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::vector<double>>> sweeps;
  for (const auto& s : raw) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--sweep expects name=v1,v2,... got: " + s);
    std::vector<double> values;
    std::stringstream ss(s.substr(eq + 1));
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.empty()) throw std::invalid_argument("--sweep has no values: " + s);
    sweeps.emplace_back(s.substr(0, eq), std::move(values));
  }
  return sweeps;
}

int run_ablate(const DataOpts& data_opts, bool have_data, GenOpts& gen_opts,
               const TrainOpts& train_opts, const std::vector<std::string>& sweep_raw,
               const std::string& models_raw, std::size_t budget, double test_frac,
               const std::string& out, bool print_tables, std::uint64_t seed,
               int jobs) {
  AblateConfig cfg;
  cfg.sweep = parse_sweeps(sweep_raw);
  cfg.bench.train = to_train_config(train_opts, seed, jobs);
  cfg.bench.budget_total_hidden = budget;
  cfg.test_fraction = test_frac;

  std::stringstream ss(models_raw);
  std::string name;
  while (std::getline(ss, name, ','))
    if (!name.empty()) cfg.models.push_back(bench_model_from_string(name));
  if (cfg.models.empty()) throw std::invalid_argument("--models lists no model");

  if (have_data) {
    cfg.fixed_data = load_data(data_opts, seed);
  } else {
    cfg.synth = gen_opts.spec;
    cfg.synth.f1 = subpattern_fn_from_string(gen_opts.f1);
    cfg.synth.f2 = subpattern_fn_from_string(gen_opts.f2);
    cfg.synth.seed = derive_seed(seed, kDatagenStream);
  }

  const auto reports = ablate(cfg);
  write_report_csv(reports, out);
  if (print_tables)
    for (const auto& report : reports) {
      if (!report.sweep_point.empty()) {
        std::printf("--");
        for (const auto& [param, value] : report.sweep_point)
          std::printf(" %s=%g", param.c_str(), value);
        std::printf("\n");
      }
      std::fputs(format_report_table(report).c_str(), stdout);
    }
  std::printf("wrote %zu report(s) to %s\n", reports.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-continuous neural networks: generate, partition, train,"
               " predict, evaluate, ablate"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file with [subcommand] sections");

  std::uint64_t seed = 0;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  app.add_option("--seed", seed, "master seed; every random stream derives from it");
  app.add_option("--jobs", jobs, "max concurrent subpattern trainings (1 = sequential)");

  GenOpts gen_opts;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  gen_cmd->fallthrough();
  add_gen_flags(gen_cmd, gen_opts);
  gen_cmd->add_option("--out", gen_opts.out, "output CSV path")->required();

  DataOpts part_data;
  double part_q = 0.5;
  std::string part_out, part_geo_out;
  auto* part_cmd = app.add_subcommand("partition", "run GET_PARTITION on a dataset");
  part_cmd->fallthrough();
  add_data_flags(part_cmd, part_data);
  part_cmd->add_option("--q", part_q, "stopping fraction in (0,1]");
  part_cmd->add_option("--out", part_out, "row_index,part_id CSV")->required();
  part_cmd->add_option("--geo-out", part_geo_out, "geometric parts (anchors) CSV");

  DataOpts train_data;
  TrainOpts train_opts;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "train a model and save it");
  train_cmd->fallthrough();
  add_data_flags(train_cmd, train_data);
  add_train_flags(train_cmd, train_opts);
  train_cmd->add_option("--model", train_opts.model,
                        "pcnn|ffnn|ffnn-rnd|ffnn-bag|ffnn-lgt");
  train_cmd->add_option("--out", train_out, "model output path")->required();

  DataOpts predict_data;
  std::string predict_model, predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "predict rows with a saved model");
  predict_cmd->fallthrough();
  add_data_flags(predict_cmd, predict_data);
  predict_cmd->add_option("--model", predict_model, "model file")->required();
  predict_cmd->add_option("--out", predict_out, "predictions CSV")->required();

  DataOpts eval_data;
  std::string eval_model, eval_split = "all", eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a dataset");
  eval_cmd->fallthrough();
  add_data_flags(eval_cmd, eval_data);
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--split", eval_split, "all|train|test");
  eval_cmd->add_option("--out", eval_out, "metrics CSV");

  DataOpts ablate_data;
  GenOpts ablate_gen;
  TrainOpts ablate_train;
  std::vector<std::string> sweep_raw;
  std::string ablate_models = "ffnn,pcnn", ablate_out;
  std::size_t ablate_budget = 0;
  double ablate_test_frac = 0.2;
  bool ablate_tables = false;
  auto* ablate_cmd =
      app.add_subcommand("ablate", "benchmark sweep over data/model parameters");
  ablate_cmd->fallthrough();
  auto* ablate_data_opt =
      ablate_cmd->add_option("--data", ablate_data.path, "fixed dataset CSV");
  ablate_cmd->add_option("--test-last", ablate_data.test_last, "last-K test split");
  ablate_cmd->add_option("--test-frac", ablate_test_frac,
                         "test fraction (fixed or generated data)");
  add_gen_flags(ablate_cmd, ablate_gen);
  add_train_flags(ablate_cmd, ablate_train);
  ablate_cmd->add_option("--sweep", sweep_raw,
                         "name=v1,v2,... over n_parts|sigma|nu|r|n_data (repeatable)")
      ->required();
  ablate_cmd->add_option("--models", ablate_models, "comma list of models");
  ablate_cmd->add_option("--budget", ablate_budget,
                         "total hidden neurons shared across parts (0 = off)");
  ablate_cmd->add_flag("--table", ablate_tables, "print a table per grid point");
  ablate_cmd->add_option("--out", ablate_out, "report CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen_cmd) return run_gen(gen_opts, seed);
    if (*part_cmd) return run_partition(part_data, part_q, part_out, part_geo_out, seed);
    if (*train_cmd) return run_train(train_data, train_opts, train_out, seed, jobs);
    if (*predict_cmd) return run_predict(predict_model, predict_data, predict_out, seed);
    if (*eval_cmd) return run_eval(eval_model, eval_data, eval_split, eval_out, seed);
    if (*ablate_cmd) {
      ablate_data.test_frac = 0.0;  // handled through cfg.test_fraction
      if (ablate_data.test_last == 0 && *ablate_data_opt)
        ablate_data.test_frac = ablate_test_frac;
      return run_ablate(ablate_data, static_cast<bool>(*ablate_data_opt), ablate_gen,
                        ablate_train, sweep_raw, ablate_models, ablate_budget,
                        ablate_test_frac, ablate_out, ablate_tables, seed, jobs);
    }
  } catch (const FileError& e) {
    std::cerr << "error:file: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error:config: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error:runtime: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
