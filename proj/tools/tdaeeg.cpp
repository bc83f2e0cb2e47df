// Command-line front end. Talks to the library through the C API only.
#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tdaeeg/tdaeeg.h"

namespace {

struct Failure {
  int status;
  std::string message;
};

void check(tda_status s) {
  if (s != TDA_OK) throw Failure{static_cast<int>(s), tda_last_error()};
}

struct ConfigDeleter {
  void operator()(tda_config* c) const { tda_config_free(c); }
};
struct ReportDeleter {
  void operator()(tda_report* r) const { tda_report_free(r); }
};
using ConfigPtr = std::unique_ptr<tda_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<tda_report, ReportDeleter>;

std::string config_value(const tda_config* cfg, const char* key) {
  size_t needed = 0;
  check(tda_config_get(cfg, key, nullptr, 0, &needed));
  std::string out(needed, '\0');
  check(tda_config_get(cfg, key, out.data(), out.size(), &needed));
  out.resize(needed - 1);
  return out;
}

// Flags that map one-to-one onto config keys. Only flags given on the
// command line override the config file.
class Overrides {
 public:
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = slots_.emplace_back(Slot{key, {}, nullptr});
    slot.opt = app->add_option(flag, slot.value, help);
    return slot.opt;
  }
  CLI::Option* add_switch(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = slots_.emplace_back(Slot{key, "on", nullptr});
    slot.opt = app->add_flag(flag, help);
    return slot.opt;
  }
  void common(CLI::App* app) {
    app->add_option("--config", config_file_, "key = value config file");
    add(app, "--workdir,--out", "workdir", "Working directory holding stage artifacts");
    add(app, "--threads", "threads", "Worker threads (0 = all cores)");
    app->add_option("--set", sets_, "Extra key=value overrides")->take_all();
  }
  // With no --config, a stage command falls back on the config.txt that
  // `run` leaves in the working directory.
  ConfigPtr build(bool use_saved) const {
    std::string file = config_file_;
    if (file.empty() && use_saved) {
      const std::string saved = config_value(apply(fresh()).get(), "workdir") + "/config.txt";
      if (std::ifstream(saved).good()) file = saved;
    }
    ConfigPtr cfg = fresh();
    if (!file.empty()) check(tda_config_load(cfg.get(), file.c_str()));
    return apply(std::move(cfg));
  }

 private:
  static ConfigPtr fresh() {
    tda_config* raw = nullptr;
    check(tda_config_new(&raw));
    return ConfigPtr(raw);
  }
  ConfigPtr apply(ConfigPtr cfg) const {
    for (const auto& s : slots_)
      if (s.opt->count() > 0) check(tda_config_set(cfg.get(), s.key.c_str(), s.value.c_str()));
    for (const auto& kv : sets_) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Failure{TDA_ERR_INVALID_ARGUMENT, "--set expects key=value, got '" + kv + "'"};
      check(tda_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    return cfg;
  }

  struct Slot {
    std::string key;
    std::string value;
    CLI::Option* opt;
  };
  std::deque<Slot> slots_;
  std::string config_file_;
  std::vector<std::string> sets_;
};

void print_report(const tda_report* r) {
  double acc = 0, se = 0, sp = 0;
  check(tda_report_metrics(r, &acc, &se, &sp));
  std::printf("acc=%.4f se=%.4f sp=%.4f", acc, se, sp);
  int64_t tp = 0, fn = 0, fp = 0, tn = 0;
  if (tda_report_counts(r, &tp, &fn, &fp, &tn) == TDA_OK)
    std::printf(" tp=%lld fn=%lld fp=%lld tn=%lld", static_cast<long long>(tp), static_cast<long long>(fn),
                static_cast<long long>(fp), static_cast<long long>(tn));
  std::printf("\n");
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Failure{TDA_ERR_INVALID_ARGUMENT, "not a number: '" + cell + "'"};
    }
  }
  return out;
}

void add_ingest_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--input", "input", "Single recording CSV (header = channel names)");
  o.add(app, "--dataset", "dataset", "Dataset list CSV: source_id,path,label");
  o.add(app, "--rate", "rate", "Sampling rate in Hz");
  o.add(app, "--order", "order", "Band-pass order (2, 4, 6 or 8)");
  o.add(app, "--channels", "channels", "Comma-separated channels to keep, in output order");
  o.add(app, "--layout", "layout", "Comma-separated expected column layout");
  o.add(app, "--window-sec", "window_sec", "Segment length in seconds");
}

void add_image_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--rows", "pi_rows", "Image rows (persistence axis)");
  o.add(app, "--cols", "pi_cols", "Image columns (birth axis)");
  o.add(app, "--sigma", "sigma", "Gaussian spread, or auto");
  o.add(app, "--t1", "t1", "First weight knot, or auto");
  o.add(app, "--t2", "t2", "Second weight knot, or auto (2 * t1)");
  o.add(app, "--t1-quantile", "t1_quantile", "Quantile of pooled persistence used by t1 = auto");
}

void add_svm_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--kernel", "kernel", "linear | rbf");
  o.add(app, "--C", "C", "Soft-margin penalty");
  o.add(app, "--gamma", "gamma", "RBF width, or auto (1 / features)");
  o.add(app, "--folds", "folds", "Cross-validation folds");
  o.add_switch(app, "--grid-search", "grid_search", "Inner 3-fold search over C and gamma");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological feature pipeline for multichannel time series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tda_version()));

  std::vector<std::pair<CLI::App*, std::unique_ptr<Overrides>>> stage_apps;
  auto stage_app = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    auto o = std::make_unique<Overrides>();
    o->common(sub);
    auto* raw = o.get();
    stage_apps.emplace_back(sub, std::move(o));
    return std::pair{sub, raw};
  };

  // ingest
  auto [ingest, ingest_o] = stage_app("ingest",
                                      "Band-pass, select channels and segment recordings. The Butterworth filter "
                                      "runs forward and backward (zero phase), so its attenuation in dB is doubled.");
  add_ingest_flags(ingest, *ingest_o);
  std::string band;
  ingest->add_option("--band", band, "Pass band low:high in Hz");
  bool no_filter = false;
  ingest->add_flag("--no-filter", no_filter, "Skip band-pass filtering");

  // embed
  auto [embed, embed_o] = stage_app("embed", "Delay-embed every segment channel into a point cloud");
  embed_o->add(embed, "--m", "m", "Embedding dimension");
  embed_o->add(embed, "--tau", "tau", "Delay in samples");
  embed_o->add(embed, "--auto-params", "auto_params", "on: estimate m and tau from AMI and FNN");
  embed_o->add(embed, "--bins", "bins", "AMI histogram bins");
  embed_o->add(embed, "--rtol", "rtol", "FNN distance-ratio threshold");
  embed_o->add(embed, "--atol", "atol", "FNN attractor-size threshold");
  embed_o->add(embed, "--max-lag", "max_lag", "Largest AMI lag");
  embed_o->add(embed, "--m-max", "m_max", "Largest FNN dimension");

  // denoise
  auto [denoise, denoise_o] = stage_app("denoise", "Prune dense points by k-PDTM and remap channels jointly");
  denoise_o->add(denoise, "--q", "q", "Nearest-neighbour mass count");
  denoise_o->add(denoise, "--k", "k", "Approximation centres (capped at the cloud size)");
  denoise_o->add(denoise, "--keep", "keep", "Points kept per segment");
  denoise_o->add(denoise, "--iters", "iters", "Lloyd iteration cap");
  denoise_o->add(denoise, "--seed", "seed", "Random seed");

  // persist
  auto [persist, persist_o] = stage_app("persist", "Vietoris-Rips persistence of every joint cloud");
  (void)persist;
  (void)persist_o;

  // filter
  auto [filter, filter_o] = stage_app("filter", "Merge per-subject diagrams and drop low-density points");
  filter_o->add(filter, "--bandwidth", "bandwidth", "cov10 | identity:<s> | manual:<h11>,<h12>,<h21>,<h22>");
  filter_o->add(filter, "--keep-fraction", "keep_fraction", "Fraction of highest-density points kept");
  filter_o->add(filter, "--emit-density", "emit_density", "Directory for per-subject density dumps");

  // vectorize
  auto [vectorize, vectorize_o] = stage_app("vectorize", "Turn filtered diagrams into feature vectors");
  vectorize_o->add(vectorize, "--descriptor", "descriptor", "pi | landscape | entropy | betti");
  add_image_flags(vectorize, *vectorize_o);
  vectorize_o->add(vectorize, "--a", "a", "Weight below t1");
  vectorize_o->add(vectorize, "--c", "c", "Weight at t2");
  vectorize_o->add(vectorize, "--grid-n", "grid_n", "Sample count for curve descriptors");
  vectorize_o->add(vectorize, "--landscape-k", "landscape_k", "Landscape layers");

  // classify
  auto [classify, classify_o] = stage_app("classify", "Cross-validated SVM on the feature table");
  classify_o->add(classify, "--features", "features", "Features CSV (default <workdir>/vectorize/features.csv)");
  add_svm_flags(classify, *classify_o);
  classify_o->add(classify, "--seed", "seed", "Fold shuffle seed");
  classify_o->add(classify, "--report", "report", "Report JSON path (default <workdir>/report.json)");
  classify_o->add_switch(classify, "--permute-labels", "permute_labels", "Shuffle labels (null control)");

  // run
  auto [run, run_o] = stage_app("run", "Run every stage from ingest to classify");
  run_o->add(run, "--dataset", "dataset", "Dataset list CSV: source_id,path,label");
  run_o->add(run, "--input", "input", "Single recording CSV");
  run_o->add(run, "--seed", "seed", "Random seed");
  run_o->add(run, "--descriptor", "descriptor", "pi | landscape | entropy | betti");
  add_image_flags(run, *run_o);
  add_svm_flags(run, *run_o);

  // sweep
  auto [sweep, sweep_o] = stage_app("sweep", "Re-vectorize and classify over a grid of (a, c) weights");
  std::string a_list = "0,1", c_list = "1,3", table_path;
  sweep->add_option("--a-values", a_list, "Comma-separated a values")->capture_default_str();
  sweep->add_option("--c-values", c_list, "Comma-separated c values")->capture_default_str();
  sweep->add_option("--table", table_path, "Output table CSV (default <workdir>/sweep.csv)");
  add_image_flags(sweep, *sweep_o);
  add_svm_flags(sweep, *sweep_o);
  sweep_o->add(sweep, "--seed", "seed", "Fold shuffle seed");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a diagram or barcode (SVG) or an image matrix (PNG)");
  std::string plot_kind, plot_in, plot_out;
  plot->add_option("--kind", plot_kind, "diagram | barcode | image")->required();
  plot->add_option("--input", plot_in, "Artifact file")->required();
  plot->add_option("--output", plot_out, "Output file")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic clouds, series or a two-class dataset");
  tda_synth_spec spec;
  tda_synth_spec_default(&spec);
  tda_two_class_spec two;
  tda_two_class_spec_default(&two);
  std::string synth_kind = "circle", synth_out;
  synth->add_option("--kind", synth_kind, "circle | blob | circle_plus_blob | sine | logistic | noise | two-class")
      ->capture_default_str();
  synth->add_option("--out", synth_out, "Output file (directory for two-class)")->required();
  synth->add_option("--n", spec.n, "Points or samples")->capture_default_str();
  synth->add_option("--noise", spec.noise_level, "Gaussian noise sd")->capture_default_str();
  synth->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  synth->add_option("--dim", spec.dim, "Dimension of blob and noise clouds")->capture_default_str();
  synth->add_option("--radius", spec.radius, "Circle radius")->capture_default_str();
  synth->add_option("--blob-n", spec.blob_n, "Blob points for circle_plus_blob")->capture_default_str();
  synth->add_option("--blob-sigma", spec.blob_sigma, "Blob sd")->capture_default_str();
  synth->add_option("--period", spec.period, "Sine period in samples")->capture_default_str();
  synth->add_option("--subjects", two.subjects_per_class, "two-class: subjects per class")->capture_default_str();
  synth->add_option("--channels", two.channels, "two-class: channels")->capture_default_str();
  synth->add_option("--segments", two.segments, "two-class: segments per subject")->capture_default_str();
  synth->add_option("--window", two.window, "two-class: samples per segment")->capture_default_str();
  synth->add_option("--rate", two.rate, "two-class: sampling rate")->capture_default_str();
  synth->add_option("--ar", two.ar, "two-class: AR(1) coefficient of the noise class")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "plot") {
      check(tda_plot(plot_kind.c_str(), plot_in.c_str(), plot_out.c_str()));
      return 0;
    }
    if (command == "synth") {
      if (synth_kind == "two-class") {
        two.seed = spec.seed;
        two.period = spec.period;
        two.noise = synth->get_option("--noise")->count() ? spec.noise_level : two.noise;
        check(tda_synth_dataset(&two, synth_out.c_str()));
      } else {
        spec.kind = synth_kind.c_str();
        check(tda_synth_write(&spec, synth_out.c_str()));
      }
      return 0;
    }

    Overrides* overrides = nullptr;
    for (auto& [sub, o] : stage_apps)
      if (sub->get_name() == command) overrides = o.get();
    ConfigPtr cfg = overrides->build(command != "run");

    if (command == "ingest") {
      if (!band.empty()) {
        const auto colon = band.find(':');
        if (colon == std::string::npos) throw Failure{TDA_ERR_INVALID_ARGUMENT, "--band expects low:high"};
        check(tda_config_set(cfg.get(), "band_low", band.substr(0, colon).c_str()));
        check(tda_config_set(cfg.get(), "band_high", band.substr(colon + 1).c_str()));
      }
      if (no_filter) check(tda_config_set(cfg.get(), "bandpass", "off"));
      check(tda_stage_run(cfg.get(), "ingest"));
    } else if (command == "run") {
      tda_report* raw = nullptr;
      check(tda_pipeline_run(cfg.get(), &raw));
      ReportPtr report(raw);
      print_report(report.get());
    } else if (command == "sweep") {
      const auto a = parse_values(a_list), c = parse_values(c_list);
      if (table_path.empty()) table_path = config_value(cfg.get(), "workdir") + "/sweep.csv";
      check(tda_sweep(cfg.get(), a.data(), a.size(), c.data(), c.size(), table_path.c_str()));
      std::ifstream in(table_path);
      std::cout << in.rdbuf();
    } else {
      check(tda_stage_run(cfg.get(), command.c_str()));
      if (command == "classify") {
        std::ifstream in(config_value(cfg.get(), "report").empty()
                             ? config_value(cfg.get(), "workdir") + "/report.json"
                             : config_value(cfg.get(), "report"));
        std::stringstream text;
        text << in.rdbuf();
        tda_report* raw = nullptr;
        check(tda_report_from_json(text.str().c_str(), &raw));
        ReportPtr report(raw);
        print_report(report.get());
      }
    }
    return 0;
  } catch (const Failure& f) {
    std::cerr << "tdaeeg " << command << ": " << f.message << "\n";
    return f.status == 0 ? 1 : f.status;
  }
}
