#include "bcsmile/app/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "bcsmile/agent/adapter.hpp"
#include "bcsmile/corpus/synthetic.hpp"
#include "bcsmile/error.hpp"
#include "bcsmile/io/csv.hpp"
#include "bcsmile/metrics/comparison.hpp"
#include "bcsmile/seq2seq/checkpoint.hpp"
#include "bcsmile/stats/anova.hpp"
#include "bcsmile/stats/glm.hpp"
#include "bcsmile/stats/tukey.hpp"

namespace bcsmile::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Left-aligned first column, right-aligned others.
std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::size_t pad = width[i] - r[i].size();
      if (i == 0) os << r[i] << std::string(pad, ' ');
      else os << "  " << std::string(pad, ' ') << r[i];
    }
    os << '\n';
  }
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string p_str(double p) { return p < 1e-4 ? fmt("%.2e", p) : fmt("%.4f", p); }

json anova_json(const stats::AnovaTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"term", r.term}, {"df", r.df}, {"sum_sq", r.sum_sq}, {"mean_sq", r.mean_sq},
                    {"f_value", r.f_value}, {"p_value", r.p_value}});
  }
  return json{{"rows", rows},
              {"residual", {{"df", t.residual_df}, {"sum_sq", t.residual_ss}, {"mean_sq", t.residual_ms}}}};
}

std::string anova_text(const stats::AnovaTable& t) {
  std::vector<std::vector<std::string>> rows{{"", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"}};
  for (const auto& r : t.rows) {
    rows.push_back({r.term, std::to_string(r.df), fmt("%.4f", r.sum_sq), fmt("%.4f", r.mean_sq),
                    fmt("%.4f", r.f_value), p_str(r.p_value) + metrics::significance_marker(r.p_value)});
  }
  rows.push_back({"Residuals", std::to_string(t.residual_df), fmt("%.4f", t.residual_ss), fmt("%.4f", t.residual_ms),
                  "", ""});
  return table(rows);
}

}  // namespace

// ---- analyze ---------------------------------------------------------------

AnalysisReport analyze_instances(const std::vector<InstanceBundle>& bundles) {
  std::vector<const InstanceBundle*> smiles;
  for (const auto& b : bundles) {
    if (b.inst.kind == corpus::WindowKind::smile) smiles.push_back(&b);
  }
  AnalysisReport rep;
  std::ostringstream os;
  os << "Smile instances: " << smiles.size() << "\n\n";
  rep.json["n_smiles"] = smiles.size();

  // Duration by listener sex, speaker sex and relationship.
  try {
    std::vector<stats::SmileFactorRecord> recs;
    for (const auto* b : smiles) {
      recs.push_back({b->inst.duration, b->listener_sex == corpus::Sex::female ? 1 : 0,
                      b->speaker_sex == corpus::Sex::female ? 1 : 0, static_cast<int>(b->relationship)});
    }
    const auto t = stats::anova_smile_factors(recs);
    os << "Type-III ANOVA of smile duration\n" << anova_text(t) << '\n';
    rep.json["anova_duration"] = anova_json(t);
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("anova: ") + e.what());
  }

  auto tukey = [&](const std::string& factor, auto label) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto* b : smiles) groups[label(*b)].push_back(b->inst.duration);
    stats::LabeledSamples samples;
    for (auto& [name, v] : groups) {
      if (v.size() >= 2) samples.emplace_back(name, std::move(v));
    }
    try {
      const auto r = stats::tukey_hsd(samples);
      std::vector<std::vector<std::string>> rows{{"", "diff", "lwr", "upr", "p adj"}};
      json pairs = json::array();
      for (const auto& p : r.pairs) {
        rows.push_back({p.group_b + "-" + p.group_a, fmt("%.4f", p.mean_diff), fmt("%.4f", p.ci_low),
                        fmt("%.4f", p.ci_high), p_str(p.adjusted_p)});
        pairs.push_back({{"group_a", p.group_a}, {"group_b", p.group_b}, {"mean_diff", p.mean_diff},
                         {"ci_low", p.ci_low}, {"ci_high", p.ci_high}, {"adjusted_p", p.adjusted_p}});
      }
      os << "Tukey HSD, duration by " << factor << '\n' << table(rows) << '\n';
      rep.json["tukey_duration"][factor] = pairs;
    } catch (const std::exception& e) {
      rep.errors.push_back("tukey " + factor + ": " + e.what());
    }
  };
  tukey("listener_sex", [](const InstanceBundle& b) { return std::string(corpus::to_string(b.listener_sex)); });
  tukey("speaker_sex", [](const InstanceBundle& b) { return std::string(corpus::to_string(b.speaker_sex)); });
  tukey("relationship", [](const InstanceBundle& b) { return std::string(corpus::to_string(b.relationship)); });

  // Intensity on the sex indicators and every z-scored context cue.
  try {
    std::vector<std::string> names{"speaker_sex", "listener_sex"};
    for (const char* role : {"speaker", "listener"}) {
      for (std::size_t i = 0; i < features::kTurnFeatureCount; ++i)
        names.push_back(std::string(role) + "_" + std::string(features::turn_feature_name(i)));
    }
    std::vector<std::vector<double>> cols(names.size());
    std::vector<double> y;
    for (const auto* b : smiles) {
      if (!b->inst.intensity) continue;
      y.push_back(corpus::score(*b->inst.intensity));
      cols[0].push_back(b->speaker_sex == corpus::Sex::female ? 1.0 : 0.0);
      cols[1].push_back(b->listener_sex == corpus::Sex::female ? 1.0 : 0.0);
      for (std::size_t i = 0; i < features::kTurnFeatureCount; ++i) {
        cols[2 + i].push_back(b->speaker_z[i]);
        cols[2 + features::kTurnFeatureCount + i].push_back(b->listener_z[i]);
      }
    }
    std::vector<std::size_t> keep;
    json dropped = json::array();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const bool constant = std::all_of(cols[c].begin(), cols[c].end(), [&](double v) { return v == cols[c].front(); });
      if (constant) dropped.push_back(names[c] + " (constant)");
      else keep.push_back(c);
    }
    stats::GlmFit fit;
    for (;;) {
      stats::Matrix x(y.size(), keep.size() + 1);
      for (std::size_t r = 0; r < y.size(); ++r) {
        x(r, 0) = 1.0;
        for (std::size_t k = 0; k < keep.size(); ++k) x(r, k + 1) = cols[keep[k]][r];
      }
      try {
        fit = stats::fit_glm_inverse_link(x, y);
        break;
      } catch (const stats::RankDeficientError& e) {
        std::vector<std::size_t> bad;
        for (std::size_t c : e.columns()) {
          if (c == 0) throw;
          bad.push_back(keep[c - 1]);
        }
        if (bad.empty()) throw;
        for (std::size_t c : bad) {
          dropped.push_back(names[c] + " (collinear)");
          keep.erase(std::find(keep.begin(), keep.end(), c));
        }
      }
    }
    std::vector<std::vector<std::string>> rows{{"", "Estimate", "Std. Error", "t value", "Pr(>|t|)", "dmu/dx"}};
    json coefs = json::array();
    for (std::size_t k = 0; k < fit.coefficients.size(); ++k) {
      const std::string name = k == 0 ? "(Intercept)" : names[keep[k - 1]];
      rows.push_back({name, fmt("%.5f", fit.coefficients[k]), fmt("%.5f", fit.std_errors[k]),
                      fmt("%.3f", fit.t_values[k]), p_str(fit.p_values[k]) + metrics::significance_marker(fit.p_values[k]),
                      fmt("%.5f", fit.mean_space_effects[k])});
      coefs.push_back({{"term", name}, {"estimate", fit.coefficients[k]}, {"std_error", fit.std_errors[k]},
                       {"t", fit.t_values[k]}, {"p", fit.p_values[k]}, {"mean_space_effect", fit.mean_space_effects[k]}});
    }
    os << "Gaussian GLM with inverse link, intensity (A=1 .. E=5) on context cues\n"
       << "n = " << y.size() << ", R^2 = " << fmt("%.4f", fit.r_squared) << ", iterations = " << fit.iterations
       << "\n"
       << "Estimates are on the linear-predictor scale (mu = 1/eta); dmu/dx has the opposite sign.\n"
       << table(rows);
    for (const auto& d : dropped) os << "dropped: " << d.get<std::string>() << '\n';
    os << '\n';
    rep.json["glm_intensity"] = {{"n", y.size()}, {"r_squared", fit.r_squared}, {"iterations", fit.iterations},
                                 {"coefficients", coefs}, {"dropped", dropped}};
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("glm: ") + e.what());
  }

  for (const auto& e : rep.errors) os << "error: " << e << '\n';
  rep.json["errors"] = rep.errors;
  rep.text = os.str();
  return rep;
}

// ---- evaluate --------------------------------------------------------------

std::string checkpoint_name(seq2seq::Ablation a, std::size_t repeat) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_r%02zu.bcsm", repeat);
  return std::string(seq2seq::to_string(a)) + buf;
}

EvaluationReport evaluate_checkpoints(const std::vector<InstanceBundle>& bundles, const fs::path& dir,
                                      const std::vector<double>& sigmas) {
  const auto view = split_view(bundles);
  if (view.test.empty()) throw Error("evaluate: the test split is empty");
  std::map<std::string, const InstanceBundle*> by_id;
  for (const auto& b : bundles) by_id[b.inst.id] = &b;

  struct Run {
    seq2seq::Ablation config;
    std::size_t repeat;
    fs::path path;
  };
  std::vector<Run> runs;
  if (!fs::is_directory(dir)) throw Error("evaluate: " + dir.string() + " is not a directory");
  const std::regex pattern(R"(([a-z_]+)_r(\d+)\.bcsm)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    auto a = seq2seq::parse_ablation(m[1].str());
    if (!a) continue;
    runs.push_back({*a, std::stoul(m[2].str()), entry.path()});
  }
  if (runs.empty()) throw Error("evaluate: no checkpoints in " + dir.string());
  std::sort(runs.begin(), runs.end(),
            [](const Run& a, const Run& b) { return std::pair(a.config, a.repeat) < std::pair(b.config, b.repeat); });

  EvaluationReport rep;
  std::ostringstream csv;
  csv << "config,repeat,instance_id,kind,intensity,duration_s,ape";
  for (double s : sigmas) csv << ",pck_" << io::format_number(s);
  csv << ",pck_mean\n";

  std::vector<seq2seq::RepeatOutcome> outcomes;
  std::vector<metrics::PerformanceRecord> ape_recs, pck_recs;
  for (const auto& run : runs) {
    const auto ck = seq2seq::load_checkpoint(run.path);
    if (ck.meta.config.ablation != run.config)
      throw Error("evaluate: " + run.path.string() + " holds a " + std::string(to_string(ck.meta.config.ablation)) +
                  " model");
    seq2seq::RepeatOutcome o;
    o.config = run.config;
    o.repeat = run.repeat;
    o.seed = ck.meta.seed;
    double sum_ape = 0.0, sum_pck = 0.0;
    for (const auto* inst : view.test) {
      const auto r = seq2seq::score_instance(ck.params, *inst, run.config, ck.meta.config.output_steps, sigmas);
      sum_ape += r.ape;
      sum_pck += r.pck_mean;
      for (const auto& [s, v] : r.pck_by_sigma) o.pck_by_sigma[s] += v;
      csv << seq2seq::to_string(run.config) << ',' << run.repeat << ',' << inst->id << ','
          << corpus::to_string(inst->kind) << ',';
      if (inst->intensity) csv << corpus::to_char(*inst->intensity);
      csv << ',' << io::format_number(inst->duration) << ',' << io::format_number(r.ape);
      for (double s : sigmas) csv << ',' << io::format_number(r.pck_by_sigma.at(s));
      csv << ',' << io::format_number(r.pck_mean) << '\n';
      if (inst->kind == corpus::WindowKind::smile && inst->intensity) {
        ape_recs.push_back({r.ape, inst->duration, *inst->intensity, run.config});
        pck_recs.push_back({r.pck_mean, inst->duration, *inst->intensity, run.config});
      }
    }
    const double n = static_cast<double>(view.test.size());
    o.ape = sum_ape / n;
    o.pck_mean = sum_pck / n;
    for (auto& [s, v] : o.pck_by_sigma) v /= n;
    outcomes.push_back(std::move(o));
  }
  rep.per_instance_csv = csv.str();

  const auto results = seq2seq::collect_results(outcomes);
  std::size_t n_repeats = 0;
  for (const auto& [a, r] : results) {
    if (n_repeats && r.ape.size() != n_repeats)
      throw Error("evaluate: configurations have different repeat counts; paired comparison needs equal counts");
    n_repeats = r.ape.size();
  }
  rep.comparison = metrics::compare_ablations(results);

  std::ostringstream os;
  os << "Test split: " << view.test.size() << " instances, " << n_repeats << " repeats per configuration\n\n";
  os << metrics::format_ablation_table(rep.comparison) << '\n';

  std::vector<std::vector<std::string>> sig_rows{{"Model"}};
  for (double s : sigmas) sig_rows[0].push_back("PCK@" + io::format_number(s));
  sig_rows[0].push_back("Wilcoxon p(APE)");
  sig_rows[0].push_back("Wilcoxon p(PCK)");
  json rows = json::array();
  for (const auto& row : rep.comparison.rows) {
    std::vector<std::string> r{std::string(seq2seq::display_name(row.config))};
    for (double s : sigmas) r.push_back(fmt("%.4f", row.mean_pck_by_sigma.at(s)));
    r.push_back(row.ape_wilcoxon ? p_str(row.ape_wilcoxon->p) : "-");
    r.push_back(row.pck_wilcoxon ? p_str(row.pck_wilcoxon->p) : "-");
    sig_rows.push_back(r);
    json jr{{"config", std::string(seq2seq::to_string(row.config))},
            {"model", std::string(seq2seq::display_name(row.config))},
            {"mean_ape", row.mean_ape},
            {"mean_pck", row.mean_pck}};
    json by_sigma = json::object();
    for (const auto& [s, v] : row.mean_pck_by_sigma) by_sigma[io::format_number(s)] = v;
    jr["mean_pck_by_sigma"] = by_sigma;
    jr["ape_per_repeat"] = results.at(row.config).ape;
    jr["pck_per_repeat"] = results.at(row.config).pck_mean;
    auto cmp = [](const std::optional<metrics::RunComparison>& c) -> json {
      if (!c) return nullptr;
      return json{{"mean_diff", c->mean_diff}, {"statistic", c->statistic}, {"p", c->p}, {"degenerate", c->degenerate}};
    };
    jr["ape_t_test"] = cmp(row.ape_vs_baseline);
    jr["pck_t_test"] = cmp(row.pck_vs_baseline);
    jr["ape_wilcoxon"] = cmp(row.ape_wilcoxon);
    jr["pck_wilcoxon"] = cmp(row.pck_wilcoxon);
    rows.push_back(jr);
  }
  os << "PCK by threshold, and Wilcoxon signed-rank p against the baseline\n" << table(sig_rows) << '\n';
  rep.json["n_test"] = view.test.size();
  rep.json["n_repeats"] = n_repeats;
  rep.json["rows"] = rows;

  auto regression = [&](const std::string& metric, const std::vector<metrics::PerformanceRecord>& recs) {
    try {
      const auto reg = metrics::performance_regression(recs);
      std::vector<std::vector<std::string>> t{{"term", "estimate", "std.error", "t", "p"}};
      json jr = json::array();
      for (const auto& r : reg) {
        t.push_back({r.term, fmt("%.5f", r.estimate), fmt("%.5f", r.std_error), fmt("%.3f", r.t),
                     p_str(r.p) + metrics::significance_marker(r.p)});
        jr.push_back({{"term", r.term}, {"estimate", r.estimate}, {"std_error", r.std_error}, {"t", r.t}, {"p", r.p}});
      }
      os << "Performance regression of per-instance " << metric
         << " (test smiles; intensity B and speaker-only are the references)\n"
         << table(t) << '\n';
      rep.json["regression_" + metric] = jr;
    } catch (const std::exception& e) {
      rep.notes.push_back(metric + " regression not estimated: " + e.what());
      rep.json["regression_" + metric] = nullptr;
    }
  };
  regression("ape", ape_recs);
  regression("pck", pck_recs);
  for (const auto& n : rep.notes) os << "note: " << n << '\n';
  rep.json["notes"] = rep.notes;
  rep.text = os.str();
  return rep;
}

// ---- subcommands -----------------------------------------------------------

void cmd_synth(const RunConfig& c, std::ostream& log) {
  fs::create_directories(c.out);
  const auto corpus = corpus::generate_synthetic_corpus(c.synth, c.seed, c.out);
  echo_run_config(c, c.out);
  log << "synth: " << corpus.records.size() << " dyads, " << corpus.smiles.size() << " smiles -> "
      << corpus.manifest.string() << '\n';
}

void cmd_preprocess(const RunConfig& c, const fs::path& manifest, std::ostream& log) {
  PreprocessOptions opt = c.preprocess;
  opt.manifest = manifest;
  const auto res = preprocess(opt);
  fs::create_directories(c.out);
  write_preprocess_outputs(res, c.out);
  echo_run_config(c, c.out);
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  for (const auto& b : res.bundles) (b.split == "train" ? n_train : b.split == "val" ? n_val : n_test)++;
  log << "preprocess: " << res.smiles_kept << " of " << res.annotations_in << " smiles kept, " << res.nonsmiles
      << " non-smile windows, " << res.bundles.size() << " instances (train " << n_train << ", val " << n_val
      << ", test " << n_test << ")\n";
  for (const auto& r : res.rejected_records) log << "  rejected record: " << r << '\n';
  for (const auto& d : res.dropped) log << "  dropped " << d << '\n';
  for (const auto& w : res.warnings) log << "  warning: " << w << '\n';
}

bool cmd_analyze(const RunConfig& c, const fs::path& instances, std::ostream& log) {
  const auto bundles = load_instance_dir(instances);
  const auto rep = analyze_instances(bundles);
  fs::create_directories(c.out);
  write_text(c.out / "analysis.txt", rep.text);
  write_text(c.out / "analysis.json", rep.json.dump(2) + "\n");
  echo_run_config(c, c.out);
  log << rep.text;
  return rep.errors.empty();
}

void cmd_train(const RunConfig& c, const fs::path& instances, std::ostream& log) {
  const auto bundles = load_instance_dir(instances);
  const auto view = split_view(bundles);
  for (const auto& b : bundles) {
    const auto& in = b.inst;
    if (in.speaker.dim != c.train.shape.embedding_dim)
      throw Error("train: instance " + in.id + " has embedding dim " + std::to_string(in.speaker.dim) +
                  ", config expects " + std::to_string(c.train.shape.embedding_dim));
    if (in.target.empty() || in.target.front().size() != c.train.shape.frame_dim())
      throw Error("train: instance " + in.id + " target frames do not match landmark_count " +
                  std::to_string(c.train.shape.landmark_count));
  }
  seq2seq::AblationSuiteConfig suite;
  suite.train = c.train;
  suite.n_repeats = c.n_repeats;
  suite.configs = c.configs;
  suite.jobs = c.jobs;
  suite.sigmas = c.sigmas;
  log << "train: " << view.train.size() << " train / " << view.val.size() << " val / " << view.test.size()
      << " test instances, " << suite.configs.size() << " configurations x " << suite.n_repeats << " repeats, "
      << suite.jobs << " jobs\n";
  const auto runs = seq2seq::run_ablation_suite(view.train, view.val, view.test, suite);

  const fs::path ck_dir = c.out / "checkpoints";
  fs::create_directories(ck_dir);
  std::ostringstream hist;
  hist << "config,repeat,epoch,train_loss,val_loss,learning_rate\n";
  json summary = json::array();
  for (const auto& r : runs) {
    seq2seq::CheckpointMeta meta;
    meta.config = c.train;
    meta.config.ablation = r.config;
    meta.config.seed = r.seed;
    meta.seed = r.seed;
    meta.epoch = r.history.best_epoch;
    meta.best_val = r.history.best_val;
    seq2seq::save_checkpoint(ck_dir / checkpoint_name(r.config, r.repeat), r.best, meta);
    for (std::size_t e = 0; e < r.history.train_loss.size(); ++e) {
      hist << seq2seq::to_string(r.config) << ',' << r.repeat << ',' << e << ','
           << io::format_number(r.history.train_loss[e]) << ',' << io::format_number(r.history.val_loss[e]) << ','
           << io::format_number(r.history.learning_rate[e]) << '\n';
    }
    json lr = json::array();
    for (const auto& ev : r.history.lr_events) lr.push_back({{"epoch", ev.epoch}, {"from", ev.old_lr}, {"to", ev.new_lr}});
    summary.push_back({{"config", std::string(seq2seq::to_string(r.config))},
                       {"repeat", r.repeat},
                       {"seed", r.seed},
                       {"best_epoch", r.history.best_epoch},
                       {"best_val", r.history.best_val},
                       {"lr_events", lr}});
    log << "  " << seq2seq::to_string(r.config) << " repeat " << r.repeat << ": best val "
        << fmt("%.6f", r.history.best_val) << " at epoch " << r.history.best_epoch << ", " << r.history.lr_events.size()
        << " LR reductions\n";
  }
  write_text(c.out / "training_history.csv", hist.str());
  write_text(c.out / "train_summary.json", summary.dump(2) + "\n");
  echo_run_config(c, c.out);
}

void cmd_evaluate(const RunConfig& c, const fs::path& instances, const fs::path& checkpoints, std::ostream& log) {
  const auto bundles = load_instance_dir(instances);
  const auto rep = evaluate_checkpoints(bundles, checkpoints, c.sigmas);
  fs::create_directories(c.out);
  write_text(c.out / "metrics_per_instance.csv", rep.per_instance_csv);
  write_text(c.out / "report.txt", rep.text);
  write_text(c.out / "report.json", rep.json.dump(2) + "\n");
  echo_run_config(c, c.out);
  log << rep.text;
}

agent::Acknowledgment cmd_adapt(const RunConfig& c, const fs::path& checkpoint, const fs::path& instances,
                                const std::string& instance_id, const std::string& sink, std::ostream& log) {
  const auto ck = seq2seq::load_checkpoint(checkpoint);
  const auto bundle = load_instance(instances, instance_id);
  const auto pred = seq2seq::predict(ck.params, bundle.inst, ck.meta.config.ablation, ck.meta.config.output_steps);
  const auto seq = seq2seq::to_landmarks(bundle.inst, pred);
  const auto adapted = agent::landmarks_to_params(seq, landmarks::LandmarkIndexMap{}, bundle.window_start);

  std::unique_ptr<agent::CommandSink> s;
  std::string endpoint = c.adapt.endpoint;
  if (sink.rfind("file:", 0) == 0) {
    s = std::make_unique<agent::FileSink>(sink.substr(5));
    endpoint.clear();
  } else if (!sink.empty()) {
    endpoint = sink;
  }
  if (!s && !endpoint.empty()) {
    agent::EndpointOptions eo;
    eo.url = endpoint;
    eo.timeout = std::chrono::milliseconds(c.adapt.timeout_ms);
    eo.retries = c.adapt.retries;
    eo.spool = c.adapt.spool;
    s = std::make_unique<agent::EndpointSink>(eo);
  }
  fs::create_directories(c.out);
  if (!s) s = std::make_unique<agent::FileSink>(c.adapt.command_file);
  echo_run_config(c, c.out);
  log << agent::to_json(adapted.command) << '\n';
  const auto ack = s->emit(adapted.command);
  log << "adapt: widest frame " << adapted.widest_frame << " of " << seq.size() << ", delivered to " << ack.target
      << " after " << ack.attempts << " attempt(s)\n";
  return ack;
}

}  // namespace bcsmile::app
