// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "eda/error.hpp"
#include "eda/parallel.hpp"
#include "eda/verify.hpp"

namespace eda {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream ids keep every random consumer independent of the others.
constexpr std::uint64_t kTaskStream = 0x7461736b;
constexpr std::uint64_t kDataStream = 0x64617461;
constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kSampleStream = 0x736d706c;
constexpr std::uint64_t kSimulateStream = 0x73696d75;
constexpr std::uint64_t kCase3Stream = 0x63617333;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"seed", "output_dir", "checkpoint", "schedule", "basis", "eta", "task", "network",
            "train", "sampler", "simulate", "demo_case3", "verify", "description"}},
      {"schedule", {"kind", "beta_min", "beta_max", "T"}},
      {"basis", {"name", "N1", "N2"}},
      {"task", {"kind", "size", "dataset_size", "amplitude", "in_dataset"}},
      {"network", {"hidden"}},
      {"train",
       {"steps", "batch", "learning_rate", "optimizer", "beta1", "beta2", "adam_epsilon",
        "objective", "parameterization", "time_sampling", "decay_factor", "decay_every",
        "ema_decay"}},
      {"sampler", {"steps", "grid", "final_denoise", "trajectory"}},
      {"simulate", {"paths", "steps", "record_every"}},
      {"demo_case3", {"etas", "n", "poisson_mean"}},
      {"verify", {"suite"}},
  };
  return keys;
}

void check_keys(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::kParse, "config root must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!allowed_keys().at("").count(key)) fail(ErrorCode::kParse, "unknown config key '" + key + "'");
    auto section = allowed_keys().find(key);
    if (section == allowed_keys().end() || key.empty()) continue;
    if (!value.is_object()) fail(ErrorCode::kParse, "config section '" + key + "' must be an object");
    for (const auto& [sub, unused] : value.items()) {
      if (!section->second.count(sub)) {
        fail(ErrorCode::kParse, "unknown config key '" + key + "." + sub + "'");
      }
    }
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorCode::kParse, "override '" + assignment + "' is not of the form key.path=value");
  }
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) fail(ErrorCode::kParse, "override path '" + path + "' has an empty segment");
    if (!node->is_object()) fail(ErrorCode::kParse, "override path '" + path + "' crosses a value");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

template <class T>
void read(const json& section, const char* key, T& out) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("config key '") + key + "': " + e.what());
  }
}

template <class T, class Parser>
void read_enum(const json& section, const char* key, T& out, Parser parse) {
  std::string name;
  read(section, key, name);
  if (!name.empty()) out = parse(name);
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  return doc.contains(key) ? doc.at(key) : empty;
}

ExperimentConfig from_json(const json& doc) {
  check_keys(doc);
  ExperimentConfig cfg;
  if (!doc.contains("seed")) fail(ErrorCode::kParse, "config is missing the mandatory 'seed'");
  read(doc, "seed", cfg.seed);
  read(doc, "output_dir", cfg.output_dir);
  read(doc, "checkpoint", cfg.checkpoint);
  read(doc, "eta", cfg.eta);

  const json& sch = section(doc, "schedule");
  read_enum(sch, "kind", cfg.schedule.kind, parse_schedule_kind);
  read(sch, "beta_min", cfg.schedule.beta_min);
  read(sch, "beta_max", cfg.schedule.beta_max);
  read(sch, "T", cfg.schedule.horizon);

  const json& basis = section(doc, "basis");
  read(basis, "name", cfg.basis.name);
  read(basis, "N1", cfg.basis.n1);
  read(basis, "N2", cfg.basis.n2);

  const json& task = section(doc, "task");
  read(task, "kind", cfg.task.kind);
  read(task, "size", cfg.task.size);
  read(task, "dataset_size", cfg.task.dataset_size);
  read(task, "amplitude", cfg.task.amplitude);
  read(task, "in_dataset", cfg.task.in_dataset);

  read(section(doc, "network"), "hidden", cfg.network.hidden);

  const json& tr = section(doc, "train");
  read(tr, "steps", cfg.train.steps);
  read(tr, "batch", cfg.train.batch);
  read(tr, "learning_rate", cfg.train.learning_rate);
  read_enum(tr, "optimizer", cfg.train.optimizer, parse_optimizer);
  read(tr, "beta1", cfg.train.beta1);
  read(tr, "beta2", cfg.train.beta2);
  read(tr, "adam_epsilon", cfg.train.adam_epsilon);
  read_enum(tr, "objective", cfg.train.objective, parse_loss_objective);
  cfg.train.parameterization = default_parameterization(cfg.train.objective);
  read_enum(tr, "parameterization", cfg.train.parameterization, parse_parameterization);
  read_enum(tr, "time_sampling", cfg.train.time_sampling, parse_time_sampling);
  read(tr, "decay_factor", cfg.train.decay_factor);
  read(tr, "decay_every", cfg.train.decay_every);
  read(tr, "ema_decay", cfg.train.ema_decay);
  cfg.train.seed = cfg.seed;

  const json& smp = section(doc, "sampler");
  read(smp, "steps", cfg.sampler.steps);
  read_enum(smp, "grid", cfg.sampler.grid, parse_grid_scheme);
  read(smp, "final_denoise", cfg.sampler.final_denoise);
  read(smp, "trajectory", cfg.sampler.trajectory);

  const json& sim = section(doc, "simulate");
  read(sim, "paths", cfg.simulate.paths);
  read(sim, "steps", cfg.simulate.steps);
  read(sim, "record_every", cfg.simulate.record_every);

  const json& c3 = section(doc, "demo_case3");
  read(c3, "etas", cfg.demo_case3.etas);
  read(c3, "n", cfg.demo_case3.n);
  read(c3, "poisson_mean", cfg.demo_case3.poisson_mean);

  read(section(doc, "verify"), "suite", cfg.verify.suite);

  require(cfg.eta >= 0.0, ErrorCode::kParse, "eta must be >= 0");
  require(cfg.task.size >= 2, ErrorCode::kParse, "task.size must be >= 2");
  require(cfg.task.dataset_size >= 1, ErrorCode::kParse, "task.dataset_size must be >= 1");
  require(cfg.sampler.steps >= 0, ErrorCode::kParse, "sampler.steps must be >= 0");
  require(cfg.simulate.paths >= 1 && cfg.simulate.steps >= 1 && cfg.simulate.record_every >= 1,
          ErrorCode::kParse, "simulate.paths, steps and record_every must be >= 1");
  try {
    cfg.train.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParse, e.what());
  }
  return cfg;
}

ExperimentConfig parse_document(json doc, const std::vector<std::string>& overrides) {
  for (const std::string& o : overrides) apply_override(doc, o);
  return from_json(doc);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

fs::path prepare_output(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + cfg.output_dir + "'");
  return fs::path(cfg.output_dir);
}

BasisSet make_basis(const BasisSpec& spec, const Shape& shape) {
  if (spec.name == "legendre-trig") return legendre_trig_basis(spec.n1, spec.n2, shape);
  if (spec.name == "pixel") return pixel_basis(shape);
  if (spec.name == "residual") return residual_basis_set(shape);
  fail(ErrorCode::kParse, "unknown basis '" + spec.name + "'");
}

class TrajectoryCsv {
 public:
  void operator()(double t, const Field& x) {
    out_ << format_double(t);
    for (double v : x.values()) out_ << ',' << format_double(v);
    out_ << '\n';
  }
  std::string header(std::size_t d) const {
    std::string h = "t";
    for (std::size_t i = 0; i < d; ++i) h += ",x" + std::to_string(i);
    return h + "\n";
  }
  std::string body() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

json region_json(const RegionMetrics& m) {
  return json{{"pixels", m.pixels}, {"mse", m.mse}, {"rmse", m.rmse}, {"psnr", m.psnr}};
}

}  // namespace

std::string ExperimentConfig::checkpoint_path() const {
  return checkpoint.empty() ? (fs::path(output_dir) / "checkpoint.bin").string() : checkpoint;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json doc = json::parse(text, nullptr, false, true);
  if (doc.is_discarded()) fail(ErrorCode::kParse, "config is not valid JSON");
  return parse_document(std::move(doc), overrides);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "config file not found: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), overrides);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

ExperimentConfig default_config(const std::vector<std::string>& overrides) {
  json doc = json{{"seed", 0}};
  return parse_document(std::move(doc), overrides);
}

Experiment::Experiment(ExperimentConfig cfg) : config(std::move(cfg)) {
  const TaskSpec& ts = config.task;
  shape = {ts.size, ts.size};
  const ScheduleSpec& ss = config.schedule;
  const Schedule schedule = Schedule::make(ss.kind, ss.beta_min, ss.beta_max, ss.horizon);
  BasisSet basis = make_basis(config.basis, shape);

  Rng task_rng(config.seed, kTaskStream);
  Rng data_rng(config.seed, kDataStream);
  if (ts.kind == "smooth-field") {
    require(basis.is_fixed(), ErrorCode::kParse, "smooth-field tasks need a fixed basis");
    task = gen_smooth_field_task(shape, basis, task_rng, ts.amplitude);
    for (int i = 0; i < ts.dataset_size; ++i) {
      const Field clean = (i == 0 && ts.in_dataset) ? task.clean : make_phantom(shape, data_rng);
      dataset.points.push_back(to_domain(clean, DomainTransform::kLog));
    }
  } else {
    const ResidualPattern pattern = parse_residual_pattern(ts.kind);
    require(!basis.is_fixed(), ErrorCode::kParse, ts.kind + " tasks need the residual basis");
    task = gen_residual_task(shape, pattern, task_rng);
    for (int i = 0; i < ts.dataset_size; ++i) {
      TaskInstance pair = (i == 0 && ts.in_dataset)
                              ? apply_residual_pattern(task.clean, pattern, data_rng)
                              : gen_residual_task(shape, pattern, data_rng);
      dataset.points.push_back(std::move(pair.clean));
      dataset.degraded.push_back(std::move(pair.degraded));
      masks.push_back(std::move(*pair.mask));
    }
  }
  process = std::make_unique<DiffusionProcess>(schedule, std::move(basis), config.eta);
}

std::vector<std::size_t> Experiment::network_widths() const {
  const std::size_t d = element_count(shape);
  std::vector<std::size_t> widths{d + 1};
  widths.insert(widths.end(), config.network.hidden.begin(), config.network.hidden.end());
  widths.push_back(d);
  return widths;
}

TrainResult Experiment::train_network(std::ostream* log) const {
  Rng init(config.seed, kInitStream);
  TinyNetwork net = TinyNetwork::initialized(network_widths(), init);
  const int every = std::max(1, config.train.steps / 10);
  auto progress = [&](int step, double loss) {
    if (log && (step + 1) % every == 0) {
      *log << "step " << step + 1 << "/" << config.train.steps << " loss " << loss << "\n";
    }
  };
  const bool weighted = config.train.objective == LossObjective::kWeightedNoisePred;
  return train(std::move(net), *process, dataset, config.train, weighted ? &masks : nullptr,
               progress);
}

std::shared_ptr<const TinyNetwork> Experiment::network(std::ostream* log) const {
  const std::string path = config.checkpoint_path();
  if (fs::exists(path)) {
    auto net = std::make_shared<const TinyNetwork>(TinyNetwork::load(path));
    require(net->widths() == network_widths(), ErrorCode::kShapeMismatch,
            "checkpoint '" + path + "' does not match the configured network");
    return net;
  }
  if (log) *log << "no checkpoint at " << path << ", training\n";
  TrainResult result = train_network(log);
  fs::create_directories(fs::path(path).parent_path().empty() ? fs::path(".")
                                                               : fs::path(path).parent_path());
  result.network.save(path);
  return std::make_shared<const TinyNetwork>(std::move(result.network));
}

PreconditionedDenoiser Experiment::denoiser(std::shared_ptr<const TinyNetwork> net) const {
  return PreconditionedDenoiser(std::move(net), *process, config.train.parameterization);
}

int cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const Experiment exp(cfg);
  TrainResult result = exp.train_network(&log);
  result.network.save(cfg.checkpoint_path());
  std::string csv = "step,loss\n";
  for (std::size_t i = 0; i < result.losses.size(); ++i) {
    csv += std::to_string(i + 1) + "," + format_double(result.losses[i]) + "\n";
  }
  write_text(out / "loss.csv", csv);
  log << "wrote " << cfg.checkpoint_path() << " and " << (out / "loss.csv").string() << "\n";
  return 0;
}

int cmd_sample(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const Experiment exp(cfg);
  const PreconditionedDenoiser den = exp.denoiser(exp.network(&log));
  Rng rng(cfg.seed, kSampleStream);
  const std::size_t pick = static_cast<std::size_t>(rng.next_u64() % exp.dataset.size());
  const Conditioning cond = exp.dataset.conditioning(pick);
  const Field x_init =
      exp.process->forward_sample(exp.dataset.points[pick], exp.process->horizon(), cond, rng);
  TrajectoryCsv trajectory;
  const TimeGrid grid = make_time_grid(exp.process->horizon(), std::max(1, cfg.sampler.steps),
                                       cfg.sampler.grid);
  const Field x = sample_euler(*exp.process, den, x_init, grid, std::ref(trajectory),
                               cfg.sampler.final_denoise);
  write_text(out / "trajectory.csv", trajectory.header(x.size()) + trajectory.body());
  const DomainTransform transform = exp.task.transform;
  save_pgm((out / "sample.pgm").string(), from_domain(x, transform));
  save_pgm((out / "sample_source.pgm").string(), from_domain(exp.dataset.points[pick], transform));
  log << "wrote trajectory.csv, sample.pgm to " << out.string() << "\n";
  return 0;
}

int cmd_restore(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const Experiment exp(cfg);
  const PreconditionedDenoiser den = exp.denoiser(exp.network(&log));
  TrajectoryCsv trajectory;
  RestorationOptions options;
  options.scheme = cfg.sampler.grid;
  options.final_denoise = cfg.sampler.final_denoise;
  if (cfg.sampler.trajectory) options.observer = std::ref(trajectory);
  const RestorationReport report =
      run_restoration(exp.task, *exp.process, den, cfg.sampler.steps, options);

  json metrics;
  metrics["task"] = exp.task.name;
  metrics["steps"] = report.steps;
  metrics["grid"] = to_string(cfg.sampler.grid);
  metrics["denoiser"] = den.variant();
  metrics["psnr_in"] = report.psnr_in;
  metrics["psnr_out"] = report.psnr_out;
  metrics["rmse_in"] = report.rmse_in;
  metrics["rmse_out"] = report.rmse_out;
  if (report.mask_in) {
    metrics["mask_in"] = region_json(*report.mask_in);
    metrics["mask_out"] = region_json(*report.mask_out);
    metrics["rest_in"] = region_json(*report.rest_in);
    metrics["rest_out"] = region_json(*report.rest_out);
  }
  write_text(out / "metrics.json", metrics.dump(2) + "\n");
  save_pgm((out / "clean.pgm").string(), exp.task.clean);
  save_pgm((out / "degraded.pgm").string(), exp.task.degraded);
  save_pgm((out / "restored.pgm").string(), report.restored);
  if (cfg.sampler.trajectory) {
    write_text(out / "trajectory.csv", trajectory.header(exp.task.clean.size()) + trajectory.body());
  }
  log << "psnr " << report.psnr_in << " -> " << report.psnr_out << ", rmse " << report.rmse_in
      << " -> " << report.rmse_out << "\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const Experiment exp(cfg);
  const DiffusionProcess& p = *exp.process;
  const Field x0 = to_domain(exp.task.clean, exp.task.transform);
  const Field degraded = to_domain(exp.task.degraded, exp.task.transform);
  const Conditioning cond{&x0, &degraded};
  const Conditioning bound = p.basis().is_fixed() ? Conditioning{} : cond;
  const SimulateSpec& spec = cfg.simulate;

  // Knot k is recorded when k % record_every == 0 and at the final knot.
  std::vector<int> recorded;
  for (int k = 0; k <= spec.steps; ++k) {
    if (k % spec.record_every == 0 || k == spec.steps) recorded.push_back(k);
  }
  const std::size_t d = x0.size(), rows = recorded.size();
  std::vector<std::vector<double>> values(static_cast<std::size_t>(spec.paths));
  std::vector<double> times(rows);
  parallel_for(static_cast<std::size_t>(spec.paths), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(cfg.seed, kSimulateStream + (i << 20));
      std::vector<double>& v = values[i];
      v.reserve(rows * d);
      int k = 0;
      std::size_t r = 0;
      p.simulate_sde(x0, spec.steps, bound, rng, [&](double t, const Field& x) {
        if (r < rows && recorded[r] == k) {
          if (i == 0) times[r] = t;
          v.insert(v.end(), x.data(), x.data() + d);
          ++r;
        }
        ++k;
      });
    }
  });

  auto basis = p.basis().bind(bound);
  Field diag(x0.shape());
  for (const Field& h : basis->elements()) diag += hadamard(h, h);
  std::string csv = "t,mean_empirical,mean_exact,var_empirical,var_exact\n";
  const auto n = static_cast<double>(spec.paths);
  for (std::size_t r = 0; r < rows; ++r) {
    double mean_emp = 0.0, var_emp = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double s1 = 0.0, s2 = 0.0;
      for (const auto& v : values) {
        s1 += v[r * d + j];
        s2 += v[r * d + j] * v[r * d + j];
      }
      const double m = s1 / n;
      mean_emp += m;
      var_emp += n > 1.0 ? (s2 - n * m * m) / (n - 1.0) : 0.0;
    }
    const ConditionalMoments exact = p.conditional_moments(x0, times[r], bound);
    const double dd = static_cast<double>(d);
    csv += format_double(times[r]) + "," + format_double(mean_emp / dd) + "," +
           format_double(sum(exact.mean) / dd) + "," + format_double(var_emp / dd) + "," +
           format_double(exact.cov_scale * sum(diag) / dd) + "\n";
  }
  write_text(out / "paths.csv", csv);
  log << "wrote " << (out / "paths.csv").string() << " (" << spec.paths << " paths)\n";
  return 0;
}

int cmd_demo_case3(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  Rng rng(cfg.seed, kCase3Stream);
  const std::vector<Case3Row> rows = case3_discrete_demo(
      centered_poisson(cfg.demo_case3.poisson_mean), cfg.demo_case3.etas, cfg.demo_case3.n, rng);
  std::string csv = "eta,distance,noise_floor\n";
  for (const Case3Row& r : rows) {
    csv += format_double(r.eta) + "," + format_double(r.distance) + "," +
           format_double(r.noise_floor) + "\n";
  }
  write_text(out / "case3.csv", csv);
  log << csv;
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path,
               std::ostream& report_out) {
  const SuiteReport report = run_suite(suite, seed);
  const std::string text = report.to_json();
  if (out_path.empty()) {
    report_out << text;
  } else {
    const fs::path parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_text(out_path, text);
  }
  return report.passed() ? 0 : 1;
}

}  // namespace eda
