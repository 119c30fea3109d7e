#include "pcnn/bench.hpp"

#include "pcnn/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcnn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::uint64_t kPartitionStream = 1;   // must match the pcnn trainer
constexpr std::uint64_t kSubpatternStream = 2;

void check_shapes(const Matrix& pred, const Matrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw std::invalid_argument("metric: prediction/truth shapes disagree");
  if (pred.rows() == 0) throw std::invalid_argument("metric: empty matrices");
}

}  // namespace

double metric_mae(const Matrix& pred, const Matrix& truth) {
  check_shapes(pred, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    total += std::abs(pred.data()[i] - truth.data()[i]);
  return total / static_cast<double>(pred.size());
}

double metric_mse(const Matrix& pred, const Matrix& truth) {
  check_shapes(pred, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred.data()[i] - truth.data()[i];
    total += e * e;
  }
  return total / static_cast<double>(pred.size());
}

double metric_mape(const Matrix& pred, const Matrix& truth, std::size_t* skipped) {
  check_shapes(pred, truth);
  double total = 0.0;
  std::size_t used = 0, zero_rows = 0;
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    const double denom = euclidean_norm(truth.row(i));
    if (denom == 0.0) {
      ++zero_rows;
      continue;
    }
    total += euclidean_distance(pred.row(i), truth.row(i)) / denom;
    ++used;
  }
  if (skipped) *skipped = zero_rows;
  if (used == 0) throw std::invalid_argument("metric_mape: all truth rows are zero");
  return total / static_cast<double>(used);
}

const char* to_string(BenchModel m) {
  switch (m) {
    case BenchModel::ffnn: return "FFNN";
    case BenchModel::ffnn_rnd: return "FFNN-RND";
    case BenchModel::ffnn_bag: return "FFNN-BAG";
    case BenchModel::ffnn_lgt: return "FFNN-LGT";
    case BenchModel::pcnn: return "PCNN";
  }
  return "?";
}

BenchModel bench_model_from_string(const std::string& s) {
  if (s == "ffnn" || s == "FFNN") return BenchModel::ffnn;
  if (s == "ffnn-rnd" || s == "FFNN-RND") return BenchModel::ffnn_rnd;
  if (s == "ffnn-bag" || s == "FFNN-BAG") return BenchModel::ffnn_bag;
  if (s == "ffnn-lgt" || s == "FFNN-LGT") return BenchModel::ffnn_lgt;
  if (s == "pcnn" || s == "PCNN") return BenchModel::pcnn;
  throw std::invalid_argument("unknown model: " + s);
}

BagModel build_ffnn_bag(const DataPartition& partition, const Dataset& train_data,
                        const PcnnTrainConfig& config) {
  std::vector<std::vector<std::size_t>> hidden = config.per_part_hidden;
  if (hidden.empty()) hidden.assign(partition.n_parts(), config.subpattern_hidden);
  BagModel model;
  model.subpatterns = train_subpatterns(
      train_data, partition.parts, config.subpattern, hidden,
      derive_seed(config.seed, kSubpatternStream), config.jobs, nullptr);
  return model;
}

PcnnModel build_ffnn_lgt(const DataPartition& partition, const Dataset& train_data,
                         const PcnnTrainConfig& config) {
  PcnnTrainConfig cfg = config;
  cfg.classifier_hidden.clear();  // single affine layer + sigmoid per part
  return train_pcnn_with_partition(train_data, partition, cfg);
}

std::vector<std::vector<std::size_t>> split_budget(std::size_t total,
                                                   std::size_t n_parts) {
  if (n_parts == 0) throw std::invalid_argument("split_budget: zero parts");
  std::vector<std::vector<std::size_t>> widths(n_parts);
  const std::size_t base = total / n_parts;
  const std::size_t extra = total % n_parts;
  for (std::size_t n = 0; n < n_parts; ++n) {
    const std::size_t w = base + (n < extra ? 1 : 0);
    widths[n] = {std::max<std::size_t>(w, 1)};
  }
  return widths;
}

namespace {

std::size_t hidden_neuron_count(const Mlp& m) {
  std::size_t total = 0;
  for (std::size_t j = 1; j + 1 < m.layer_dims.size(); ++j) total += m.layer_dims[j];
  return total;
}

struct TrainedModel {
  AnyModel model;
  double l_time = 0.0;
  double p_time = 0.0;
  std::size_t n_parts = 1;
};

// Subpattern phases are timed twice when jobs > 1: once sequentially (L) and
// once with the configured jobs (P). Identical derived seeds make both runs
// produce the same parameters, so the timing rerun changes nothing else.
TrainedModel train_bench_model(BenchModel which, const Dataset& train_data,
                               const DataPartition& partition,
                               const PcnnTrainConfig& cfg,
                               std::size_t ffnn_hidden_budget) {
  TrainedModel out;
  switch (which) {
    case BenchModel::ffnn:
    case BenchModel::ffnn_rnd: {
      std::vector<std::size_t> dims;
      dims.push_back(train_data.input_dim());
      if (ffnn_hidden_budget > 0)
        dims.push_back(ffnn_hidden_budget);
      else
        dims.insert(dims.end(), cfg.subpattern_hidden.begin(),
                    cfg.subpattern_hidden.end());
      dims.push_back(train_data.target_dim());
      TrainConfig tc = cfg.subpattern;
      if (which == BenchModel::ffnn_rnd) tc.mode = TrainMode::random_readout;
      // Same derived seed as subpattern 0 of a single-part PCNN.
      tc.seed = derive_seed(derive_seed(cfg.seed, kSubpatternStream), 0);
      const auto t0 = Clock::now();
      Mlp m = train_ffnn(train_data, tc, dims);
      out.l_time = out.p_time = seconds_since(t0);
      out.model = std::move(m);
      return out;
    }
    case BenchModel::ffnn_bag: {
      auto t0 = Clock::now();
      PcnnTrainConfig seq = cfg;
      seq.jobs = 1;
      BagModel m = build_ffnn_bag(partition, train_data, seq);
      out.l_time = seconds_since(t0);
      out.p_time = out.l_time;
      if (cfg.jobs > 1) {
        t0 = Clock::now();
        m = build_ffnn_bag(partition, train_data, cfg);
        out.p_time = seconds_since(t0);
      }
      out.n_parts = partition.n_parts();
      out.model = std::move(m);
      return out;
    }
    case BenchModel::ffnn_lgt:
    case BenchModel::pcnn: {
      PcnnTrainConfig seq = cfg;
      seq.jobs = 1;
      PcnnTrainInfo info;
      auto t0 = Clock::now();
      PcnnModel m = which == BenchModel::pcnn
                        ? train_pcnn_with_partition(train_data, partition, seq, &info)
                        : build_ffnn_lgt(partition, train_data, seq);
      out.l_time = seconds_since(t0);
      out.p_time = out.l_time;
      if (cfg.jobs > 1) {
        t0 = Clock::now();
        PcnnModel mp = which == BenchModel::pcnn
                           ? train_pcnn_with_partition(train_data, partition, cfg, &info)
                           : build_ffnn_lgt(partition, train_data, cfg);
        out.p_time = seconds_since(t0);
        m = std::move(mp);
      }
      out.n_parts = partition.n_parts();
      out.model = std::move(m);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

BenchmarkReport run_experiment(const std::vector<BenchModel>& models,
                               const Dataset& data, const BenchConfig& config,
                               const ExperimentMeta& meta) {
  const Dataset train_data = data.train_subset();
  const Dataset test_data = data.test_subset();
  if (train_data.n_rows() == 0 || test_data.n_rows() == 0)
    throw std::invalid_argument("run_experiment: needs nonempty train and test splits");

  BenchmarkReport report;
  report.meta = meta;

  // One shared partition per experiment: BAG, LGT and PCNN all build on the
  // same GET_PARTITION draw, as the benchmark design prescribes.
  const bool needs_partition =
      std::any_of(models.begin(), models.end(), [](BenchModel m) {
        return m == BenchModel::ffnn_bag || m == BenchModel::ffnn_lgt ||
               m == BenchModel::pcnn;
      });
  DataPartition partition;
  PcnnTrainConfig base_cfg = config.train;
  if (needs_partition) {
    const PartitionResult pr =
        resolve_partition(train_data.inputs, base_cfg.n_parts_hint, base_cfg.q,
                          derive_seed(base_cfg.seed, kPartitionStream));
    partition = pr.partition;
    if (config.budget_total_hidden > 0)
      base_cfg.per_part_hidden =
          split_budget(config.budget_total_hidden, partition.n_parts());
  }

  for (const auto which : models) {
    ReportRow row;
    row.model = to_string(which);
    try {
      const TrainedModel trained = train_bench_model(
          which, train_data, partition, base_cfg, config.budget_total_hidden);
      const Matrix pred = predict_any(trained.model, test_data.inputs);
      row.mae = metric_mae(pred, test_data.targets);
      row.mse = metric_mse(pred, test_data.targets);
      row.mape = metric_mape(pred, test_data.targets, &row.mape_skipped);
      row.l_time_s = trained.l_time;
      row.p_time_s = trained.p_time;
      row.n_parts = trained.n_parts;
      row.params_total = total_parameter_count(trained.model);

      if (const auto* pc = std::get_if<PcnnModel>(&trained.model)) {
        double total = 0.0;
        for (std::size_t i = 0; i < test_data.n_rows(); ++i)
          total += static_cast<double>(
              active_parameter_count(*pc, test_data.inputs.row(i)));
        row.params_per_input = total / static_cast<double>(test_data.n_rows());
        for (const auto& s : pc->subpatterns) row.hidden_neurons += hidden_neuron_count(s);
      } else if (const auto* bag = std::get_if<BagModel>(&trained.model)) {
        row.params_per_input = static_cast<double>(row.params_total);
        for (const auto& s : bag->subpatterns) row.hidden_neurons += hidden_neuron_count(s);
      } else {
        row.params_per_input = static_cast<double>(row.params_total);
        row.hidden_neurons = hidden_neuron_count(std::get<Mlp>(trained.model));
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<BenchmarkReport> ablate(const AblateConfig& config) {
  if (config.sweep.empty()) throw std::invalid_argument("ablate: empty sweep");
  for (const auto& [param, values] : config.sweep)
    if (values.empty())
      throw std::invalid_argument("ablate: no values for parameter " + param);

  // Cartesian product over the sweep axes.
  std::vector<std::vector<std::pair<std::string, double>>> points{{}};
  for (const auto& [param, values] : config.sweep) {
    std::vector<std::vector<std::pair<std::string, double>>> next;
    for (const auto& point : points)
      for (const double v : values) {
        auto extended = point;
        extended.emplace_back(param, v);
        next.push_back(std::move(extended));
      }
    points = std::move(next);
  }

  std::vector<BenchmarkReport> reports;
  reports.reserve(points.size());
  for (const auto& point : points) {
    BenchConfig bench = config.bench;
    SyntheticSpec spec = config.synth;
    bool data_param_swept = false;
    for (const auto& [param, value] : point) {
      if (param == "n_parts") {
        bench.train.n_parts_hint = static_cast<std::size_t>(value);
      } else if (param == "sigma") {
        spec.sigma = value;
        data_param_swept = true;
      } else if (param == "nu") {
        spec.nu = value;
        data_param_swept = true;
      } else if (param == "r") {
        spec.r = value;
        data_param_swept = true;
      } else if (param == "n_data") {
        spec.n = static_cast<std::size_t>(value);
        data_param_swept = true;
      } else {
        throw std::invalid_argument("ablate: unknown sweep parameter " + param);
      }
    }
    if (data_param_swept && config.fixed_data)
      throw std::invalid_argument(
          "ablate: data parameters cannot be swept over a fixed dataset");

    Dataset data;
    if (config.fixed_data) {
      data = *config.fixed_data;
    } else {
      Rng rng(spec.seed);
      data = generate(spec, rng);
      apply_split(data, SplitSpec::fraction(config.test_fraction,
                                            derive_seed(spec.seed, 11)));
    }
    ExperimentMeta meta{data.input_dim(), data.n_rows(), spec.sigma,
                        spec.nu,          spec.r,        bench.train.seed};
    BenchmarkReport report = run_experiment(config.models, data, bench, meta);
    report.sweep_point = point;
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_report_csv(const std::vector<BenchmarkReport>& reports,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing: " + path);
  out << "sweep_param,sweep_value,model,status,mae,mse,mape,mape_skipped,"
         "p_time_s,l_time_s,params_per_input,params_total,hidden_neurons,"
         "n_parts,d,sigma,n_data,nu,r,seed\n";
  for (const auto& report : reports) {
    std::string sweep_param = "-", sweep_value = "-";
    if (!report.sweep_point.empty()) {
      std::string p, v;
      for (const auto& [param, value] : report.sweep_point) {
        if (!p.empty()) {
          p += ';';
          v += ';';
        }
        p += param;
        v += fmt(value);
      }
      sweep_param = p;
      sweep_value = v;
    }
    for (const auto& row : report.rows) {
      out << sweep_param << ',' << sweep_value << ',' << row.model << ','
          << (row.ok ? "ok" : "error") << ',' << fmt(row.mae) << ',' << fmt(row.mse)
          << ',' << fmt(row.mape) << ',' << row.mape_skipped << ','
          << fmt(row.p_time_s) << ',' << fmt(row.l_time_s) << ','
          << fmt(row.params_per_input) << ',' << row.params_total << ','
          << row.hidden_neurons << ',' << row.n_parts << ',' << report.meta.d << ','
          << fmt(report.meta.sigma) << ',' << report.meta.n_data << ','
          << fmt(report.meta.nu) << ',' << fmt(report.meta.r) << ','
          << report.meta.seed << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_report_table(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %10s %10s %10s %10s %7s %5s %7s %8s %5s %6s\n",
                "model", "MAE", "P.Time", "L.Time", "#Par/x", "#Parts", "d",
                "sigma", "#Data", "nu", "r");
  out << line;
  for (const auto& row : report.rows) {
    if (!row.ok) {
      std::snprintf(line, sizeof line, "%-9s failed: %.180s\n", row.model.c_str(),
                    row.error.c_str());
      out << line;
      continue;
    }
    std::snprintf(line, sizeof line,
                  "%-9s %10s %10s %10s %10s %7zu %5zu %7s %8zu %5s %6s\n",
                  row.model.c_str(), fmt_short(row.mae).c_str(),
                  fmt_short(row.p_time_s).c_str(), fmt_short(row.l_time_s).c_str(),
                  fmt_short(row.params_per_input).c_str(), row.n_parts, report.meta.d,
                  fmt_short(report.meta.sigma).c_str(), report.meta.n_data,
                  fmt_short(report.meta.nu).c_str(), fmt_short(report.meta.r).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace pcnn
