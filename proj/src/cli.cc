#include "scidetect/cli.h"

#include <algorithm>
#include <csignal>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "scidetect/corpus.h"
#include "scidetect/demo_corpus.h"
#include "scidetect/error.h"
#include "scidetect/io.h"
#include "scidetect/models.h"
#include "scidetect/service.h"
#include "scidetect/simulate.h"
#include "scidetect/workbench.h"

namespace scidetect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SplitFlags {
  double fraction = 0.0;  // 0: no split
  std::uint64_t seed = 7;
};

void add_split_flags(CLI::App* cmd, SplitFlags& f) {
  cmd->add_option("--split", f.fraction,
                  "Hold out a stratified test split; train uses this fraction")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--split-seed", f.seed, "Seed of the stratified split");
}

std::pair<Corpus, Corpus> apply_split(const Corpus& c, const SplitFlags& f) {
  if (f.fraction <= 0.0) return {c, c};
  return split_corpus(c, {f.fraction, f.seed, Stratify::kBoth});
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"auc", m.auc ? json(*m.auc) : json()}, {"n", m.n}};
}

fs::path with_extension(fs::path p, const std::string& ext) {
  if (p.extension() == ".csv" || p.extension() == ".json") p.replace_extension();
  p += ext;
  return p;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_ingest(const fs::path& input, const fs::path& output, std::ostream& out,
               std::ostream& err) {
  const LoadReport report = load_corpus_report(input);
  for (const auto& [line, message] : report.errors) {
    err << input.string() << ":" << line << ": " << message << "\n";
  }
  std::map<std::string, std::size_t> labels;
  std::map<std::string, std::size_t> sources;
  for (const Excerpt& e : report.corpus.excerpts) {
    ++labels[e.true_label ? std::string(label_name(*e.true_label)) : "unlabeled"];
    ++sources[e.dataset()];
  }
  out << "excerpts: " << report.corpus.size() << "\n";
  for (const auto& [k, v] : labels) out << "label " << k << ": " << v << "\n";
  for (const auto& [k, v] : sources) out << "source " << k << ": " << v << "\n";
  if (!report.errors.empty()) {
    err << report.errors.size() << " invalid record(s)\n";
    return kExitDomain;
  }
  if (!output.empty()) write_corpus(report.corpus, output);
  return kExitOk;
}

int cmd_train(const fs::path& corpus_path, const std::string& source, const std::string& id,
              const fs::path& output, const SplitFlags& split, double l2, std::ostream& out) {
  const Corpus corpus = load_corpus(corpus_path);
  const CorpusStats stats = fit_corpus_stats(corpus, default_top_words_path());
  Corpus train_set = apply_split(corpus, split).first;
  if (!source.empty()) {
    const std::string name = train_set.name;
    train_set = filter_by_source(train_set, source);
    train_set.name = name;
  }
  std::set<Label> classes;
  for (const Excerpt& e : train_set.excerpts) {
    if (e.true_label) classes.insert(*e.true_label);
  }
  if (classes.size() < 2) {
    throw DomainError("training set for \"" + (source.empty() ? "all" : source) +
                      "\" has fewer than two classes");
  }
  TrainConfig config;
  config.l2 = l2;
  Model model = train(train_set, stats, id, config);
  model.training_source = source.empty() ? "all" : source;
  save_model(model, output);
  const Metrics m = evaluate(model, train_set, stats);
  out << "model " << model.id << " trained on " << train_set.size() << " excerpts (source "
      << model.training_source << "), training accuracy " << fmt(m.accuracy) << "\n";
  return kExitOk;
}

int cmd_eval(const std::vector<fs::path>& model_paths, const fs::path& corpus_path, bool matrix,
             bool check_pattern, const fs::path& output, const SplitFlags& split,
             std::ostream& out, std::ostream& err) {
  std::vector<Model> models;
  for (const fs::path& p : model_paths) models.push_back(load_model(p));
  const Corpus corpus = load_corpus(corpus_path);
  const CorpusStats stats = fit_corpus_stats(corpus, default_top_words_path());
  const Corpus test_set = apply_split(corpus, split).second;

  std::vector<std::pair<std::string, Corpus>> groups;
  if (matrix) groups = group_by_dataset(test_set);
  const EvalMatrix em = matrix ? cross_evaluate(models, groups, stats)
                               : cross_evaluate(models, std::vector<std::pair<std::string, Corpus>>{
                                                            {"Total", test_set}},
                                                        stats);
  std::vector<std::string> columns = em.test_names;
  if (!matrix) columns.resize(1);

  std::ostringstream csv;
  csv << "model";
  for (const std::string& c : columns) csv << "," << c;
  csv << "\n";
  out << std::left << std::setw(14) << "model";
  for (const std::string& c : columns) out << std::setw(12) << c;
  out << "\n";
  json doc = {{"corpus", corpus.name}, {"columns", columns}, {"rows", json::array()}};
  for (std::size_t i = 0; i < em.model_ids.size(); ++i) {
    csv << em.model_ids[i];
    out << std::setw(14) << em.model_ids[i];
    json cells = json::object();
    for (std::size_t j = 0; j < columns.size(); ++j) {
      csv << "," << em.cells[i][j].accuracy;
      out << std::setw(12) << fmt(em.cells[i][j].accuracy);
      cells[columns[j]] = metrics_json(em.cells[i][j]);
    }
    csv << "\n";
    out << "\n";
    doc["rows"].push_back({{"model", em.model_ids[i]},
                           {"training_source", models[i].training_source},
                           {"cells", cells}});
  }

  bool pattern_ok = true;
  if (check_pattern) {
    json violations = json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
      const auto diag = std::find(columns.begin(), columns.end(), models[i].training_source);
      if (diag == columns.end() || *diag == "Total") continue;
      const double d = em.cells[i][static_cast<std::size_t>(diag - columns.begin())].accuracy;
      for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == "Total" || columns[j] == *diag || columns[j] == "human") continue;
        if (d < em.cells[i][j].accuracy) {
          pattern_ok = false;
          violations.push_back({{"model", models[i].id}, {"column", columns[j]}});
          err << "pattern violation: " << models[i].id << " scores " << fmt(d) << " on "
              << *diag << " but " << fmt(em.cells[i][j].accuracy) << " on " << columns[j] << "\n";
        }
      }
    }
    doc["pattern_check"] = {{"passed", pattern_ok}, {"violations", violations}};
  }
  if (!output.empty()) {
    write_file_atomic(with_extension(output, ".csv"), csv.str());
    write_file_atomic(with_extension(output, ".json"), doc.dump(2) + "\n");
  }
  return pattern_ok ? kExitOk : kExitDomain;
}

struct SimulateFlags {
  fs::path corpus;
  std::vector<fs::path> models;
  std::vector<std::string> policies{"c3"};
  double oracle_p = 0.9;
  int seeds = 20;
  std::uint64_t seed_base = 1;
  WorkflowParams params;
  fs::path out;
  fs::path transcript;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  std::vector<Model> models;
  for (const fs::path& p : f.models) models.push_back(load_model(p));
  if (models.empty()) throw DomainError("simulate needs at least one model");
  std::vector<std::string> ids;
  for (const Model& m : models) ids.push_back(m.id);
  Workbench wb(load_corpus(f.corpus), models);
  std::vector<Policy> policies;
  for (const std::string& p : f.policies) {
    if (p == "all") {
      policies = {Policy::kC1, Policy::kC2, Policy::kC3};
      break;
    }
    policies.push_back(parse_policy(p));
  }
  if (f.seeds < 1) throw ValidationError("seeds", "seeds must be at least 1");

  std::map<Policy, std::vector<double>> acc;
  json per_seed = json::array();
  std::string transcript;
  std::ostringstream csv;
  csv << "seed";
  for (Policy p : policies) csv << "," << policy_name(p);
  csv << "\n";
  for (int k = 0; k < f.seeds; ++k) {
    const std::uint64_t seed = f.seed_base + static_cast<std::uint64_t>(k);
    json row = {{"seed", seed}};
    csv << seed;
    for (Policy p : policies) {
      SimulationConfig cfg;
      cfg.params = f.params;
      cfg.oracle = {f.oracle_p, seed};
      cfg.policy = p;
      const SimulationResult r = simulate(wb, ids, cfg);
      acc[p].push_back(r.final_accuracy);
      row[std::string(policy_name(p))] = r.final_accuracy;
      if (p == Policy::kC2) row["c2_model"] = r.c2_model;
      csv << "," << r.final_accuracy;
      for (const json& line : r.transcript()) transcript += line.dump() + "\n";
    }
    if (acc.contains(Policy::kC3) && acc.contains(Policy::kC2)) {
      row["delta_c3_c2"] = acc[Policy::kC3].back() - acc[Policy::kC2].back();
    }
    if (acc.contains(Policy::kC3) && acc.contains(Policy::kC1)) {
      row["delta_c3_c1"] = acc[Policy::kC3].back() - acc[Policy::kC1].back();
    }
    per_seed.push_back(row);
    csv << "\n";
  }
  json medians = json::object();
  for (Policy p : policies) {
    const double m = median(acc[p]);
    medians[std::string(policy_name(p))] = m;
    out << "policy " << policy_name(p) << " median accuracy " << fmt(m) << " over " << f.seeds
        << " seeds\n";
  }
  json doc = {{"corpus", wb.corpus().name},
              {"models", ids},
              {"oracle_p", f.oracle_p},
              {"per_seed", per_seed},
              {"median", medians}};
  if (medians.contains("c3") && medians.contains("c2")) {
    doc["median_delta_c3_c2"] = medians["c3"].get<double>() - medians["c2"].get<double>();
    out << "median delta c3 - c2: " << fmt(doc["median_delta_c3_c2"].get<double>()) << "\n";
  }
  if (medians.contains("c3") && medians.contains("c1")) {
    doc["median_delta_c3_c1"] = medians["c3"].get<double>() - medians["c1"].get<double>();
    out << "median delta c3 - c1: " << fmt(doc["median_delta_c3_c1"].get<double>()) << "\n";
  }
  if (!f.out.empty()) {
    write_file_atomic(with_extension(f.out, ".json"), doc.dump(2) + "\n");
    write_file_atomic(with_extension(f.out, ".csv"), csv.str());
  }
  if (!f.transcript.empty()) write_file_atomic(f.transcript, transcript);
  return kExitOk;
}

int cmd_serve(ServiceConfig config, std::ostream& out) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(std::move(config));
  const int port = service.bind();
  out << "listening on port " << port << std::endl;
  std::thread worker([&service] { service.run(); });
  int sig = 0;
  sigwait(&signals, &sig);
  service.stop();
  worker.join();
  out << "stopped" << std::endl;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-based detection of machine-generated scientific text", "scidetect"};
  app.require_subcommand(1);

  fs::path input;
  fs::path output;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file");
  ingest->add_option("--corpus,input", input, "Corpus file (JSON lines)")->required();
  ingest->add_option("--out,output", output, "Write the normalized corpus here");

  int profiles = 2;
  int per_profile = 50;
  std::uint64_t synth_seed = 7;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic demo corpus");
  synth->add_option("--profiles", profiles, "Machine profiles (2-4)");
  synth->add_option("--per-profile", per_profile, "Excerpt pairs per profile");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", output, "Output corpus file")->required();

  fs::path corpus;
  std::string source;
  std::string model_id;
  double l2 = TrainConfig{}.l2;
  SplitFlags split;
  auto* train_cmd = app.add_subcommand("train", "Train a logistic detector");
  train_cmd->add_option("--corpus", corpus, "Corpus file")->required();
  train_cmd->add_option("--source", source, "Train only on this source/dataset");
  train_cmd->add_option("--model", model_id, "Model id")->required();
  train_cmd->add_option("--out", output, "Model file")->required();
  train_cmd->add_option("--l2", l2, "L2 penalty");
  add_split_flags(train_cmd, split);

  std::vector<fs::path> model_paths;
  bool matrix = false;
  bool check_pattern = false;
  auto* eval = app.add_subcommand("eval", "Evaluate models on a corpus");
  eval->add_option("--model", model_paths, "Model file (repeatable)")->required();
  eval->add_option("--corpus", corpus, "Corpus file")->required();
  eval->add_flag("--matrix", matrix, "Break the test set down by source");
  eval->add_flag("--check-pattern", check_pattern,
                 "Fail when a model scores lower on its own source than on another");
  eval->add_option("--out", output, "Report path (CSV and JSON written together)");
  add_split_flags(eval, split);

  SimulateFlags sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the review loop with an oracle");
  simulate_cmd->add_option("--corpus", sim.corpus, "Labeled corpus file")->required();
  simulate_cmd->add_option("--model", sim.models, "Model file (repeatable)")->required();
  simulate_cmd->add_option("--policy", sim.policies, "c1, c2, c3 or all (repeatable)");
  simulate_cmd->add_option("--oracle-p", sim.oracle_p, "Oracle accuracy")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--seeds", sim.seeds, "Number of seeds");
  simulate_cmd->add_option("--seed-base", sim.seed_base, "First seed");
  simulate_cmd->add_option("--omega-g", sim.params.omega_g, "Global match weight");
  simulate_cmd->add_option("--omega-d", sim.params.omega_d, "Feature distribution weight");
  simulate_cmd->add_option("--iteration-size", sim.params.iteration_size, "Batch size");
  simulate_cmd->add_option("--out", sim.out, "Report path (CSV and JSON written together)");
  simulate_cmd->add_option("--transcript", sim.transcript, "JSON-lines transcript path");

  ServiceConfig service;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--data-dir", service.data_dir, "Directory with corpora/ and models/")
      ->required();
  serve->add_option("--port", service.port, "Port (0 picks a free one)");
  serve->add_option("--host", service.host, "Bind address");
  serve->add_option("--static", static_dir, "UI bundle directory");
  serve->add_option("--max-sessions", service.max_sessions, "Session limit");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitIo;
  }

  try {
    if (*ingest) return cmd_ingest(input, output, out, err);
    if (*synth) {
      write_corpus(synthesize_demo_corpus(profiles, per_profile, synth_seed), output);
      out << "wrote " << output.string() << "\n";
      return kExitOk;
    }
    if (*train_cmd) return cmd_train(corpus, source, model_id, output, split, l2, out);
    if (*eval) return cmd_eval(model_paths, corpus, matrix, check_pattern, output, split, out, err);
    if (*simulate_cmd) return cmd_simulate(sim, out);
    if (*serve) {
      if (!static_dir.empty()) service.static_dir = static_dir;
      return cmd_serve(std::move(service), out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitIo;
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv + std::min(argc, 1), argv + argc), std::cout, std::cerr);
}

}  // namespace scidetect
