#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpattack/dpattack.hpp"
#include "dpattack/ddm/bfs.hpp"
#include "dpattack/oracle/builtin_model.hpp"
#include "dpattack/oracle/synthetic.hpp"
#include "dpattack/theory/checks.hpp"

namespace fs = std::filesystem;
using namespace dpattack;

namespace {

// builtin:<model file> or http:<url>.
OracleFactory make_factory(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) {
    auto model = std::make_shared<const BuiltinModel>(BuiltinModel::load(spec.substr(8)));
    return [model] { return std::make_shared<BuiltinOracle>(model); };
  }
  if (spec.rfind("http:", 0) == 0) {
    std::string url = spec.substr(5);
    // Accept both http:host:port and http:http://host:port.
    if (url.rfind("//", 0) == 0) url = "http:" + url;
    if (url.find("://") == std::string::npos) url = "http://" + url;
    auto client = std::make_shared<HttpOracle>(url);
    return [client] { return client; };
  }
  throw FormatError("oracle must be builtin:<file> or http:<url>, got '" + spec + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoul(tok));
    } catch (const std::exception&) {
      throw FormatError("bad block size '" + tok + "'");
    }
  }
  return out;
}

ReportFormat format_for(const std::string& out, const std::string& explicit_fmt) {
  if (!explicit_fmt.empty()) return parse_report_format(explicit_fmt);
  return fs::path(out).extension() == ".csv" ? ReportFormat::csv : ReportFormat::json;
}

struct AttackArgs {
  std::string oracle, image, dataset, out = "report.json", format;
  std::string norm = "linf", mode = "dyn", method = "dpattack", block_sizes = "4,8,16,32";
  double eps = 0.05;
  std::size_t max_queries = 500;
  std::uint64_t seed = 0;
  bool trace = false, plot_data = false;
  std::optional<double> evade_sigma;
  std::optional<int> label;
  double beta = 0.9;
  int steps = 8;
};

int cmd_attack(const AttackArgs& a) {
  AttackConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.norm = parse_norm(a.norm);
  cfg.eps = a.eps;
  cfg.max_queries = a.max_queries;
  cfg.mode = parse_init_mode(a.mode);
  cfg.block_sizes = parse_sizes(a.block_sizes);
  cfg.seed = a.seed;
  cfg.trace = a.trace;
  cfg.evade_sigma = a.evade_sigma;
  cfg.lambda.beta = a.beta;
  cfg.lambda.steps = a.steps;
  cfg.validate();

  std::vector<LabeledImage> dataset;
  if (!a.image.empty()) {
    LabeledImage li{load_image(a.image), std::nullopt, fs::path(a.image).filename().string()};
    if (a.label) li.label = Label{*a.label};
    dataset.push_back(std::move(li));
  } else {
    dataset = load_dataset_dir(a.dataset);
  }
  const BenchmarkReport rep = run_benchmark(cfg, dataset, make_factory(a.oracle));
  write_report(rep, a.out, format_for(a.out, a.format), a.plot_data);
  std::cout << "asr " << rep.asr << " images " << rep.results.size();
  if (rep.avg_q) std::cout << " avg_q " << *rep.avg_q << " med_q " << *rep.med_q;
  std::cout << "\n";
  return 0;
}

struct TrainArgs {
  std::string arch = "mlp", dataset = "textures", out = "model.json", export_dir;
  std::size_t channels = 1, size = 16, per_class = 100, epochs = 300, export_count = 100;
  int classes = 4, hidden = 32;
  double lr = 0.01;
  std::uint64_t seed = 1;
};

int cmd_train(const TrainArgs& a) {
  TrainSpec ts;
  ts.architecture = parse_architecture(a.arch);
  ts.data.kind = parse_dataset_kind(a.dataset);
  ts.data.shape = Shape{a.channels, a.size, a.size};
  ts.data.classes = a.classes;
  ts.data.per_class = a.per_class;
  ts.hidden = a.hidden;
  ts.epochs = a.epochs;
  ts.learning_rate = a.lr;
  const TrainResult tr = train_builtin(ts, a.seed);
  tr.model.save(a.out);
  DatasetSpec test = ts.data;
  test.per_class = (a.export_count + a.classes - 1) / a.classes;
  const auto held_out = make_dataset(test, a.seed + 7919);
  std::cout << "train_accuracy " << tr.train_accuracy << " test_accuracy "
            << accuracy(tr.model, held_out) << " loss " << tr.final_loss << "\n";
  if (!a.export_dir.empty()) {
    fs::create_directories(a.export_dir);
    std::ostringstream csv;
    csv << "file,label\n";
    for (std::size_t i = 0; i < held_out.size() && i < a.export_count; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "img_%04zu.png", i);
      save_png(held_out[i].image, (fs::path(a.export_dir) / name).string());
      csv << name << "," << held_out[i].label.value << "\n";
    }
    write_text((fs::path(a.export_dir) / "labels.csv").string(), csv.str());
  }
  return 0;
}

struct BfsArgs {
  std::string model, dataset, out = "bfs.csv", norm = "linf", space = "ycbcr";
  std::size_t block_size = 8, samples = 8, count = 20;
  double eps = 0.05;
  std::uint64_t seed = 0;
};

int cmd_bfs(const BfsArgs& a) {
  const BuiltinModel m = BuiltinModel::load(a.model);
  std::vector<ImageTensor> images;
  std::vector<Label> labels;
  if (!a.dataset.empty()) {
    for (auto& li : load_dataset_dir(a.dataset)) {
      labels.push_back(li.label ? *li.label : m.predict(li.image.data()));
      images.push_back(std::move(li.image));
    }
  } else {
    DatasetSpec ds;
    ds.shape = m.input_shape();
    ds.classes = m.classes();
    ds.per_class = (a.count + ds.classes - 1) / ds.classes;
    for (auto& s : make_dataset(ds, a.seed + 17)) {
      images.push_back(std::move(s.image));
      labels.push_back(s.label);
    }
  }
  BfsOptions opt;
  opt.block_size = a.block_size;
  opt.eps = a.eps;
  opt.samples = a.samples;
  opt.norm = parse_norm(a.norm);
  opt.space = parse_stats_space(a.space);
  opt.seed = a.seed;
  const BfsProfile p = bfs_profile(m, images, labels, opt);
  std::ostringstream csv;
  csv.precision(17);
  csv << "channel,i,j,mean_loss\n";
  for (std::size_t c = 0; c < p.channels; ++c)
    for (std::size_t i = 0; i < p.block_size; ++i)
      for (std::size_t j = 0; j < p.block_size; ++j)
        csv << c << "," << i << "," << j << "," << p.at(c, i, j) << "\n";
  write_text(a.out, csv.str());
  std::cout << "sigma_max " << p.sigma_max << "\n";
  return 0;
}

struct PreviewArgs {
  std::string image, out = "preview.json", space = "ycbcr";
  std::size_t block_size = 8;
  std::uint64_t seed = 0;
};

nlohmann::json direction_json(const Direction& d, const Shape& s) {
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = d[i];
  return tensor_to_json(Tensor(s, std::move(v)));
}

int cmd_preview(const PreviewArgs& a) {
  const ImageTensor x = load_image(a.image);
  const StatsSpace space = parse_stats_space(a.space);
  const std::size_t w = a.block_size;
  const FrequencyStats st = compute_freq_stats(x, w, space);
  const Shape band{st.channels, w, w};
  nlohmann::json j;
  j["block_size"] = w;
  j["space"] = a.space;
  j["seed"] = a.seed;
  j["stats"] = {{"sigma", tensor_to_json(Tensor(band, st.sigma))},
                {"mu", tensor_to_json(Tensor(band, st.mu))}};
  nlohmann::json dirs;
  dirs["dn"] = direction_json(sample_dn(x, st, a.seed), x.shape());
  dirs["db"] = direction_json(make_db(x.size(), w), x.shape());
  dirs["dr"] = direction_json(make_dr(x, w, a.seed), x.shape());
  for (BaseDirection b : {BaseDirection::dn, BaseDirection::db, BaseDirection::dr}) {
    try {
      dirs[std::string("phi_") + base_name(b)] =
          direction_json(lowfreq_wrap(x, b, w, a.seed, space), x.shape());
    } catch (const LevelError& e) {
      dirs[std::string("phi_") + base_name(b)] = nullptr;
      std::cerr << "warning: " << e.what() << "\n";
    }
  }
  j["directions"] = std::move(dirs);
  write_text(a.out, j.dump());
  return 0;
}

struct TheoryArgs {
  std::vector<std::string> checks;
  std::string out = "mc_report.json", model;
  std::uint64_t seed = 0;
};

int cmd_theory(const TheoryArgs& a) {
  std::optional<BuiltinModel> victim;
  if (!a.model.empty()) victim = BuiltinModel::load(a.model);
  const auto& names = a.checks.empty() ? theory_check_names() : a.checks;
  nlohmann::json reports = nlohmann::json::array();
  bool all = true;
  for (const auto& name : names) {
    for (const McReport& r : run_theory_check(name, a.seed, victim)) {
      std::cout << (r.pass ? "pass " : "FAIL ") << r.check << " estimate " << r.estimate
                << " target " << r.target << "\n";
      all = all && r.pass;
      reports.push_back(r.to_json());
    }
  }
  write_text(a.out, nlohmann::json{{"pass", all}, {"reports", reports}}.dump(2));
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-label black-box attack toolkit"};
  app.require_subcommand(1);

  AttackArgs aa;
  auto* attack = app.add_subcommand("attack", "Attack an image or a dataset directory");
  attack->add_option("--oracle", aa.oracle, "builtin:<model.json> or http:<url>")->required();
  auto* img = attack->add_option("--image", aa.image, "PNG or tensor JSON image");
  auto* dir = attack->add_option("--dataset", aa.dataset, "Directory of images (+labels.csv)");
  img->excludes(dir);
  attack->add_option("--label", aa.label, "Ground-truth label for --image");
  attack->add_option("--norm", aa.norm)->check(CLI::IsMember({"linf", "l2"}));
  attack->add_option("--eps", aa.eps);
  attack->add_option("--max-queries", aa.max_queries);
  attack->add_option("--mode", aa.mode)->check(CLI::IsMember({"dyn", "opt"}));
  attack->add_option("--method", aa.method)
      ->check(CLI::IsMember({"dpattack", "adba", "hrays", "nrays"}));
  attack->add_option("--block-sizes", aa.block_sizes);
  attack->add_option("--seed", aa.seed);
  attack->add_option("--out", aa.out);
  attack->add_option("--format", aa.format)->check(CLI::IsMember({"json", "csv"}));
  attack->add_flag("--trace", aa.trace, "Include per-query traces");
  attack->add_flag("--plot-data", aa.plot_data, "Include the ASR-vs-budget curve");
  attack->add_option("--evade-sigma", aa.evade_sigma, "Randomized probes with this noise std");
  attack->add_option("--lambda-beta", aa.beta);
  attack->add_option("--lambda-steps", aa.steps);

  TrainArgs ta;
  auto* train = app.add_subcommand("train-model", "Train a builtin victim on synthetic data");
  train->add_option("--arch", ta.arch)->check(CLI::IsMember({"mlp", "linear"}));
  train->add_option("--dataset", ta.dataset)->check(CLI::IsMember({"textures", "blobs"}));
  train->add_option("--channels", ta.channels);
  train->add_option("--size", ta.size);
  train->add_option("--classes", ta.classes);
  train->add_option("--per-class", ta.per_class);
  train->add_option("--hidden", ta.hidden);
  train->add_option("--epochs", ta.epochs);
  train->add_option("--lr", ta.lr);
  train->add_option("--seed", ta.seed);
  train->add_option("--out", ta.out);
  train->add_option("--export-dir", ta.export_dir, "Write a held-out set as PNG + labels.csv");
  train->add_option("--export-count", ta.export_count);

  BfsArgs ba;
  auto* bfs = app.add_subcommand("bfs", "Band-wise loss sensitivity of a builtin model");
  bfs->add_option("--model", ba.model)->required();
  bfs->add_option("--dataset", ba.dataset);
  bfs->add_option("--count", ba.count, "Synthetic images when no dataset is given");
  bfs->add_option("--block-size", ba.block_size);
  bfs->add_option("--eps", ba.eps);
  bfs->add_option("--samples", ba.samples);
  bfs->add_option("--norm", ba.norm)->check(CLI::IsMember({"linf", "l2"}));
  bfs->add_option("--space", ba.space)->check(CLI::IsMember({"ycbcr", "rgb"}));
  bfs->add_option("--seed", ba.seed);
  bfs->add_option("--out", ba.out);

  PreviewArgs pa;
  auto* preview = app.add_subcommand("init-preview", "Dump initial directions and statistics");
  preview->add_option("--image", pa.image)->required();
  preview->add_option("--block-size", pa.block_size);
  preview->add_option("--space", pa.space)->check(CLI::IsMember({"ycbcr", "rgb"}));
  preview->add_option("--seed", pa.seed);
  preview->add_option("--out", pa.out);

  TheoryArgs va;
  auto* theory = app.add_subcommand("validate-theory", "Monte Carlo and counting checks");
  theory->add_option("--check", va.checks)
      ->delimiter(',')
      ->check(CLI::IsMember(theory_check_names()));
  theory->add_option("--model", va.model, "Builtin model for hrays-growth");
  theory->add_option("--seed", va.seed);
  theory->add_option("--out", va.out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*attack) {
      if (aa.image.empty() == aa.dataset.empty()) {
        throw FormatError("exactly one of --image and --dataset is required");
      }
      return cmd_attack(aa);
    }
    if (*train) return cmd_train(ta);
    if (*bfs) return cmd_bfs(ba);
    if (*preview) return cmd_preview(pa);
    if (*theory) return cmd_theory(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
