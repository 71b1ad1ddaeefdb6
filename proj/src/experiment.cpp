#include "missdiff/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "missdiff/bayes_net.hpp"
#include "missdiff/checkpoint.hpp"
#include "missdiff/csv.hpp"

namespace missdiff {

namespace {

using nlohmann::json;

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t hash_cell_key(const std::string& mechanism, double ratio, uint64_t seed) {
  uint64_t bits;
  std::memcpy(&bits, &ratio, sizeof(bits));
  return fnv1a(mechanism) ^ Rng::mix(bits) ^ Rng::mix(seed);
}

TrainMode method_mode(const std::string& method) {
  if (method == "missdiff") return TrainMode::missdiff;
  if (method == "diff_mean") return TrainMode::mean_impute;
  if (method == "diff_delete") return TrainMode::row_delete;
  throw std::invalid_argument("unknown method '" + method + "'");
}

Table load_dataset(const std::string& spec, uint64_t data_seed) {
  if (spec.rfind("bn:", 0) == 0) {
    const int n = std::stoi(spec.substr(3));
    Rng rng(data_seed);
    return generate_bayesian_network(n, rng);
  }
  return read_csv_file(spec);
}

json utility_to_json(const UtilityReport& u) {
  json out;
  if (u.task == TaskKind::regression) {
    out["task"] = "regression";
    out["rmse"] = u.rmse;
    out["r2"] = u.r2;
  } else {
    out["task"] = u.task == TaskKind::binary_classification ? "binary_classification"
                                                            : "multiclass_classification";
    out["accuracy"] = u.accuracy;
    out["f1"] = u.f1;
    out["weighted_f1"] = u.weighted_f1;
    out["auroc"] = u.auroc;
  }
  return out;
}

struct CellStats {
  int n = 0;
  double sum = 0.0, sumsq = 0.0;
  void add(double v) {
    ++n;
    sum += v;
    sumsq += v * v;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stdev() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sumsq - n * m * m) / (n - 1)));
  }
};

// Column mean / mode fill, the reference imputer the paper-style comparison
// runs against.
Table mean_mode_fill(const Table& observed) {
  Table completed = observed;
  for (int j = 0; j < observed.n_cols(); ++j) {
    if (observed.schema.columns[static_cast<size_t>(j)].kind == ColumnKind::continuous) {
      double acc = 0.0;
      int count = 0;
      for (int i = 0; i < observed.n_rows(); ++i)
        if (!observed.at(i, j).is_na()) {
          acc += observed.at(i, j).num;
          ++count;
        }
      if (count == 0) continue;
      const Cell fill = Cell::number(acc / count);
      for (int i = 0; i < observed.n_rows(); ++i)
        if (completed.at(i, j).is_na()) completed.at(i, j) = fill;
    } else {
      std::map<std::string, int> counts;
      std::vector<std::string> order;
      for (int i = 0; i < observed.n_rows(); ++i)
        if (!observed.at(i, j).is_na()) {
          if (counts.emplace(observed.at(i, j).cat, 0).second)
            order.push_back(observed.at(i, j).cat);
          counts[observed.at(i, j).cat] += 1;
        }
      if (order.empty()) continue;
      std::string best = order.front();
      for (const std::string& cat : order)
        if (counts[cat] > counts[best]) best = cat;
      const Cell fill = Cell::category(best);
      for (int i = 0; i < observed.n_rows(); ++i)
        if (completed.at(i, j).is_na()) completed.at(i, j) = fill;
    }
  }
  return completed;
}

}  // namespace

TrainConfig train_config_from_json_text(const std::string& json_text) {
  const json t = json::parse(json_text);
  TrainConfig c;
  if (t.contains("T")) c.T = t.at("T").get<int>();
  if (t.contains("beta_min")) c.beta_min = t.at("beta_min").get<double>();
  if (t.contains("beta_max")) c.beta_max = t.at("beta_max").get<double>();
  if (t.contains("epochs")) c.epochs = t.at("epochs").get<int>();
  if (t.contains("batch")) c.batch = t.at("batch").get<int>();
  if (t.contains("base_lr")) c.base_lr = t.at("base_lr").get<double>();
  if (t.contains("channels")) c.channels = t.at("channels").get<int>();
  if (t.contains("embed_dim")) c.embed_dim = t.at("embed_dim").get<int>();
  if (t.contains("num_blocks")) c.num_blocks = t.at("num_blocks").get<int>();
  if (t.contains("seed")) c.seed = t.at("seed").get<uint64_t>();
  if (t.contains("mode")) c.mode = train_mode_from_string(t.at("mode").get<std::string>());
  return c;
}

ExperimentConfig experiment_config_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig c;
  if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
  if (j.contains("test_dataset")) c.test_dataset = j.at("test_dataset").get<std::string>();
  if (j.contains("bn_test_rows")) c.bn_test_rows = j.at("bn_test_rows").get<int>();
  if (j.contains("data_seed")) c.data_seed = j.at("data_seed").get<uint64_t>();
  if (j.contains("mechanisms"))
    c.mechanisms = j.at("mechanisms").get<std::vector<std::string>>();
  if (j.contains("ratios")) c.ratios = j.at("ratios").get<std::vector<double>>();
  if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  if (j.contains("target")) c.target = j.at("target").get<std::string>();
  if (j.contains("run_imputation")) c.run_imputation = j.at("run_imputation").get<bool>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("train")) c.train = train_config_from_json_text(j.at("train").dump());
  if (c.mechanisms.empty() || c.ratios.empty() || c.methods.empty() || c.seeds.empty())
    throw std::invalid_argument("experiment config: empty grid dimension");
  for (size_t i = 0; i < c.seeds.size(); ++i)
    for (size_t k = i + 1; k < c.seeds.size(); ++k)
      if (c.seeds[i] == c.seeds[k])
        throw std::invalid_argument("experiment config: seeds must be distinct");
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["dataset"] = c.dataset;
  j["test_dataset"] = c.test_dataset;
  j["bn_test_rows"] = c.bn_test_rows;
  j["data_seed"] = c.data_seed;
  j["mechanisms"] = c.mechanisms;
  j["ratios"] = c.ratios;
  j["methods"] = c.methods;
  j["seeds"] = c.seeds;
  j["target"] = c.target;
  j["run_imputation"] = c.run_imputation;
  j["out_dir"] = c.out_dir;
  j["train"] = {{"T", c.train.T},
                {"beta_min", c.train.beta_min},
                {"beta_max", c.train.beta_max},
                {"epochs", c.train.epochs},
                {"batch", c.train.batch},
                {"base_lr", c.train.base_lr},
                {"channels", c.train.channels},
                {"embed_dim", c.train.embed_dim},
                {"num_blocks", c.train.num_blocks}};
  return j.dump(2);
}

uint64_t experiment_config_hash(const ExperimentConfig& config) {
  // nlohmann::json keeps keys sorted, so the dump is canonical.
  return fnv1a(experiment_config_to_json(config));
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const Table data = load_dataset(config.dataset, config.data_seed);
  Table test_table;
  bool have_test = false;
  if (!config.target.empty()) {
    if (!config.test_dataset.empty()) {
      test_table = read_csv_file(config.test_dataset);
      have_test = true;
    } else if (config.dataset.rfind("bn:", 0) == 0) {
      Rng rng(Rng(config.data_seed).fork(0x7E57));
      test_table = generate_bayesian_network(config.bn_test_rows, rng);
      have_test = true;
    }
  }

  const uint64_t config_hash = experiment_config_hash(config);
  ExperimentResult result;

  for (const std::string& mechanism : config.mechanisms)
    for (const double ratio : config.ratios) {
      // One mask per (mechanism, ratio, seed), shared across methods.
      for (const uint64_t seed : config.seeds) {
        MechanismConfig mech;
        mech.kind = mechanism_from_string(mechanism);
        mech.ratio = ratio;
        Rng mask_rng(hash_cell_key(mechanism, ratio, seed));
        MaskMatrix mask;
        std::string mask_error;
        try {
          mask = generate_mask(mech, data, mask_rng);
        } catch (const std::exception& e) {
          mask_error = e.what();
        }

        for (const std::string& method : config.methods) {
          RunRecord record;
          record.mechanism = mechanism;
          record.ratio = ratio;
          record.method = method;
          record.seed = seed;
          record.config_hash = config_hash;
          const auto started = std::chrono::steady_clock::now();

          try {
            if (!mask_error.empty())
              throw std::runtime_error("mask generation failed: " + mask_error);
            const Table observed = apply_mask(data, mask);
            TrainConfig train_config = config.train;
            train_config.mode = method_mode(method);
            train_config.seed = seed;
            const Checkpoint ckpt = train(observed, mask, train_config);

            Rng sample_rng(Rng(seed).fork(fnv1a(method + ":sample")));
            const Table synth = sample(ckpt, data.n_rows(), sample_rng);
            record.fidelity = fidelity_score(data, synth, data.schema).composite;

            if (have_test) {
              record.utility = tstr(data, test_table, synth, config.target);
              record.has_utility = true;
            }
            if (config.run_imputation && method != "diff_delete") {
              Rng impute_rng(Rng(seed).fork(fnv1a(method + ":impute")));
              const Table completed = method == "missdiff"
                                          ? impute(ckpt, observed, 1, impute_rng)[0]
                                          : mean_mode_fill(observed);
              const Schema fitted = fit_encoder(data, data.schema);
              record.imputation = imputation_error(completed, data, mask, fitted);
              record.has_imputation = true;
            }
            record.status = "ok";
          } catch (const NoCompleteRows&) {
            record.status = "not_applicable";
          } catch (const std::exception& e) {
            record.status = std::string("error: ") + e.what();
          }

          record.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                  .count();
          log << mechanism << " ratio " << ratio << " " << method << " seed " << seed
              << ": " << record.status;
          if (record.status == "ok") log << " fidelity " << record.fidelity << "%";
          log << " (" << record.wall_seconds << "s)\n";
          result.runs.push_back(std::move(record));
        }
      }
    }

  // Summary: mean and std of fidelity per cell over seeds.
  std::map<std::tuple<std::string, double, std::string>, CellStats> cells;
  std::map<std::tuple<std::string, double, std::string>, int> not_applicable;
  for (const RunRecord& r : result.runs) {
    const auto key = std::make_tuple(r.mechanism, r.ratio, r.method);
    if (r.status == "ok")
      cells[key].add(r.fidelity);
    else if (r.status == "not_applicable")
      not_applicable[key] += 1;
  }
  std::ostringstream summary;
  summary << "mechanism,missing_ratio,method,fidelity_mean,fidelity_std,n_ok,n_na\n";
  for (const std::string& mechanism : config.mechanisms)
    for (const double ratio : config.ratios)
      for (const std::string& method : config.methods) {
        const auto key = std::make_tuple(mechanism, ratio, method);
        const auto it = cells.find(key);
        summary << mechanism << ',' << format_double(ratio) << ',' << method << ',';
        if (it != cells.end())
          summary << format_double(it->second.mean()) << ','
                  << format_double(it->second.stdev()) << ',' << it->second.n;
        else
          summary << ",,0";
        summary << ',' << not_applicable[key] << "\n";
      }
  result.summary_csv = summary.str();

  for (const std::string& mechanism : config.mechanisms) {
    std::ostringstream curve;
    curve << "missing_ratio,method,mean,std\n";
    for (const double ratio : config.ratios)
      for (const std::string& method : config.methods) {
        const auto it = cells.find(std::make_tuple(mechanism, ratio, method));
        if (it == cells.end()) continue;
        curve << format_double(ratio) << ',' << method << ','
              << format_double(it->second.mean()) << ','
              << format_double(it->second.stdev()) << "\n";
      }
    result.curve_csv.emplace_back(mechanism, curve.str());
  }

  if (!config.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    json runs = json::array();
    for (const RunRecord& r : result.runs) {
      json jr;
      jr["mechanism"] = r.mechanism;
      jr["ratio"] = r.ratio;
      jr["method"] = r.method;
      jr["seed"] = r.seed;
      jr["status"] = r.status;
      jr["config_hash"] = r.config_hash;
      jr["wall_seconds"] = r.wall_seconds;
      if (r.status == "ok") {
        jr["fidelity"] = r.fidelity;
        if (r.has_utility) jr["utility"] = utility_to_json(r.utility);
        if (r.has_imputation)
          jr["imputation"] = {{"rmse", r.imputation.rmse},
                              {"continuous_cells", r.imputation.continuous_cells},
                              {"categorical_error_rate", r.imputation.categorical_error_rate},
                              {"categorical_cells", r.imputation.categorical_cells}};
      }
      runs.push_back(std::move(jr));
    }
    write_text_file((fs::path(config.out_dir) / "runs.json").string(), runs.dump(2) + "\n");
    write_text_file((fs::path(config.out_dir) / "summary.csv").string(), result.summary_csv);
    for (const auto& [mechanism, csv] : result.curve_csv)
      write_text_file((fs::path(config.out_dir) / ("curve_" + mechanism + ".csv")).string(),
                      csv);
  }
  return result;
}

}  // namespace missdiff
