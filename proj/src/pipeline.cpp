#include "tdaeeg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tdaeeg/diagram_filter.hpp"
#include "tdaeeg/dtm.hpp"
#include "tdaeeg/embedding.hpp"
#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"
#include "tdaeeg/rips.hpp"

namespace tdaeeg::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

bool parse_bool(std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("expected on/off, got '" + std::string(v) + "'");
}

std::vector<std::string> parse_list(std::string_view v) {
  std::vector<std::string> out;
  if (io::trim(v).empty()) return out;
  for (const auto& cell : io::split(v, ',')) out.emplace_back(io::trim(cell));
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

struct KeyDef {
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <class T>
KeyDef field(T PipelineConfig::*ptr) {
  KeyDef d;
  d.set = [ptr](PipelineConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, std::string>) {
      c.*ptr = std::string(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      c.*ptr = parse_bool(v);
    } else if constexpr (std::is_same_v<T, int>) {
      c.*ptr = static_cast<int>(io::parse_int(v));
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      const auto x = io::parse_int(v);
      if (x < 0) throw InvalidArgument("seed must be non-negative");
      c.*ptr = static_cast<std::uint64_t>(x);
    } else if constexpr (std::is_same_v<T, double>) {
      c.*ptr = io::parse_double(v);
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      c.*ptr = parse_list(v);
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      if (v == "auto") c.*ptr = std::nullopt;
      else c.*ptr = io::parse_double(v);
    }
  };
  d.get = [ptr](const PipelineConfig& c) -> std::string {
    const auto& x = c.*ptr;
    if constexpr (std::is_same_v<T, std::string>) return x;
    else if constexpr (std::is_same_v<T, bool>) return x ? "on" : "off";
    else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) return std::to_string(x);
    else if constexpr (std::is_same_v<T, double>) return io::format_double(x);
    else if constexpr (std::is_same_v<T, std::vector<std::string>>) return join(x);
    else return x ? io::format_double(*x) : std::string("auto");
  };
  return d;
}

const std::map<std::string, KeyDef, std::less<>>& key_table() {
  using P = PipelineConfig;
  static const std::map<std::string, KeyDef, std::less<>> table = {
      {"dataset", field(&P::dataset)},
      {"input", field(&P::input)},
      {"workdir", field(&P::workdir)},
      {"features", field(&P::features)},
      {"report", field(&P::report)},
      {"rate", field(&P::rate)},
      {"band_low", field(&P::band_low)},
      {"band_high", field(&P::band_high)},
      {"order", field(&P::order)},
      {"bandpass", field(&P::bandpass)},
      {"layout", field(&P::layout)},
      {"channels", field(&P::channels)},
      {"window_sec", field(&P::window_sec)},
      {"auto_params", field(&P::auto_params)},
      {"m", field(&P::m)},
      {"tau", field(&P::tau)},
      {"bins", field(&P::bins)},
      {"max_lag", field(&P::max_lag)},
      {"m_max", field(&P::m_max)},
      {"rtol", field(&P::rtol)},
      {"atol", field(&P::atol)},
      {"fnn_threshold", field(&P::fnn_threshold)},
      {"estimate_segments", field(&P::estimate_segments)},
      {"q", field(&P::q)},
      {"k", field(&P::k)},
      {"keep", field(&P::keep)},
      {"iters", field(&P::iters)},
      {"seed", field(&P::seed)},
      {"bandwidth", field(&P::bandwidth)},
      {"keep_fraction", field(&P::keep_fraction)},
      {"emit_density", field(&P::emit_density)},
      {"descriptor", field(&P::descriptor)},
      {"pi_rows", field(&P::pi_rows)},
      {"pi_cols", field(&P::pi_cols)},
      {"sigma", field(&P::sigma)},
      {"a", field(&P::a)},
      {"c", field(&P::c)},
      {"t1", field(&P::t1)},
      {"t2", field(&P::t2)},
      {"t1_quantile", field(&P::t1_quantile)},
      {"grid_n", field(&P::grid_n)},
      {"landscape_k", field(&P::landscape_k)},
      {"kernel", field(&P::kernel)},
      {"C", field(&P::C)},
      {"gamma", field(&P::gamma)},
      {"folds", field(&P::folds)},
      {"grid_search", field(&P::grid_search)},
      {"permute_labels", field(&P::permute_labels)},
      {"threads", field(&P::threads)},
  };
  return table;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  const auto v = io::trim(value);
  if (key == "gamma" && v == "auto") {
    gamma = 0.0;
    return;
  }
  if (key == "sigma" && v == "auto") {
    sigma = 0.0;
    return;
  }
  try {
    it->second.set(*this, v);
  } catch (const Error& e) {
    throw InvalidArgument("config key '" + std::string(key) + "': " + e.what());
  }
}

std::string PipelineConfig::get(std::string_view key) const {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  return it->second.get(*this);
}

std::vector<std::string> PipelineConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : key_table()) out.push_back(k);
  return out;
}

void PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing config file " + path.string());
  std::istringstream in(io::read_text(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = io::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set(io::trim(t.substr(0, eq)), io::trim(t.substr(eq + 1)));
    } catch (const Error& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string PipelineConfig::to_text() const {
  std::string out;
  for (const auto& [k, def] : key_table()) out += k + " = " + def.get(*this) + "\n";
  return out;
}

std::size_t PipelineConfig::window_samples() const {
  return static_cast<std::size_t>(std::llround(window_sec * rate));
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
  };
  require(rate > 0, "rate must be positive");
  if (bandpass) {
    require(order == 2 || order == 4 || order == 6 || order == 8, "filter order must be one of 2, 4, 6, 8");
    require(band_low > 0 && band_low < band_high && band_high < rate / 2,
            "band must satisfy 0 < low < high < rate/2");
  }
  require(!channels.empty(), "channel list is empty");
  require(std::set<std::string>(channels.begin(), channels.end()).size() == channels.size(),
          "channel list has duplicates");
  require(window_sec > 0 && window_samples() >= 1, "window must hold at least one sample");
  require(m >= 1 && tau >= 1, "m and tau must be >= 1");
  require(bins >= 2 && max_lag >= 1 && m_max >= 1 && estimate_segments >= 1, "invalid estimation settings");
  require(rtol > 0 && atol > 0 && fnn_threshold > 0 && fnn_threshold <= 1, "invalid FNN thresholds");
  require(q >= 1 && k >= 1 && keep >= 1 && iters >= 1, "q, k, keep and iters must be >= 1");
  require(bandwidth == "cov10" || bandwidth.rfind("identity:", 0) == 0 || bandwidth.rfind("manual:", 0) == 0,
          "unknown bandwidth spec '" + bandwidth + "'");
  if (bandwidth != "cov10") diagram::BandwidthSpec::parse(bandwidth, {});
  require(keep_fraction > 0 && keep_fraction <= 1, "keep_fraction must lie in (0, 1]");
  require(descriptor == "pi" || descriptor == "landscape" || descriptor == "entropy" || descriptor == "betti",
          "unknown descriptor '" + descriptor + "'");
  require(pi_rows >= 1 && pi_cols >= 1, "image grid must be at least 1x1");
  require(a >= 0 && c >= 0, "weights a and c must be >= 0");
  if (t1) require(*t1 >= 0, "t1 must be >= 0");
  if (t1 && t2) require(*t1 < *t2, "t1 must be below t2");
  require(t1_quantile >= 0 && t1_quantile <= 1, "t1_quantile must lie in [0, 1]");
  require(grid_n >= 1 && landscape_k >= 1, "grid_n and landscape_k must be >= 1");
  classify::parse_kernel(kernel);
  require(C > 0, "C must be positive");
  require(folds >= 2, "folds must be >= 2");
  require(threads >= 0, "threads must be >= 0");
}

fs::path PipelineConfig::dir(std::string_view sub) const { return fs::path(workdir) / sub; }

fs::path PipelineConfig::features_path() const {
  return features.empty() ? dir("vectorize") / "features.csv" : fs::path(features);
}

fs::path PipelineConfig::report_path() const {
  return report.empty() ? fs::path(workdir) / "report.json" : fs::path(report);
}

// ---------------------------------------------------------------- helpers

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

// Runs fn, re-raising any failure as a StageError naming `file`.
template <class Fn>
auto in_stage(std::string_view stage, const fs::path& file, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(stage), file.string(), e.what());
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t ordinal) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (ordinal + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string stem_for(const std::string& subject, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return subject + "_" + buf;
}

struct SubjectEntry {
  std::string source_id;
  int label = -1;
  std::vector<std::size_t> segments;
};

struct Manifest {
  double rate = 0;
  std::size_t window = 0;
  std::vector<std::string> channels;
  std::vector<SubjectEntry> subjects;
};

struct SegmentRef {
  std::size_t subject = 0;
  std::size_t index = 0;
  std::string stem;
};

std::vector<SegmentRef> segment_refs(const Manifest& m) {
  std::vector<SegmentRef> out;
  for (std::size_t s = 0; s < m.subjects.size(); ++s)
    for (auto idx : m.subjects[s].segments) out.push_back({s, idx, stem_for(m.subjects[s].source_id, idx)});
  return out;
}

fs::path manifest_path(const PipelineConfig& cfg) { return cfg.dir("segments") / "manifest.json"; }

void write_manifest(const PipelineConfig& cfg, const Manifest& m) {
  json j;
  j["rate"] = m.rate;
  j["window"] = m.window;
  j["channels"] = m.channels;
  j["subjects"] = json::array();
  for (const auto& s : m.subjects) {
    json segs = json::array();
    for (auto idx : s.segments) segs.push_back({{"index", idx}, {"file", stem_for(s.source_id, idx) + ".csv"}});
    j["subjects"].push_back({{"source_id", s.source_id}, {"label", s.label}, {"segments", segs}});
  }
  io::write_text(manifest_path(cfg), j.dump(2) + "\n");
}

Manifest read_manifest(const PipelineConfig& cfg, std::string_view stage) {
  const auto path = manifest_path(cfg);
  return in_stage(stage, path, [&] {
    if (!fs::exists(path)) throw IoError("missing manifest; run the ingest stage first");
    Manifest m;
    try {
      const auto j = json::parse(io::read_text(path));
      m.rate = j.at("rate").get<double>();
      m.window = j.at("window").get<std::size_t>();
      m.channels = j.at("channels").get<std::vector<std::string>>();
      for (const auto& s : j.at("subjects")) {
        SubjectEntry e;
        e.source_id = s.at("source_id").get<std::string>();
        e.label = s.at("label").get<int>();
        for (const auto& seg : s.at("segments")) e.segments.push_back(seg.at("index").get<std::size_t>());
        m.subjects.push_back(std::move(e));
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed manifest: ") + e.what());
    }
    return m;
  });
}

void reset_dir(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
}

struct DatasetEntry {
  std::string source_id;
  fs::path path;
  int label = -1;
};

std::vector<DatasetEntry> dataset_entries(const PipelineConfig& cfg) {
  std::vector<DatasetEntry> out;
  if (!cfg.dataset.empty()) {
    const fs::path list(cfg.dataset);
    in_stage("ingest", list, [&] {
      if (!fs::exists(list)) throw IoError("missing dataset list");
      const auto table = io::read_csv(list, true);
      auto col = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        return it == table.header.end() ? -1 : it - table.header.begin();
      };
      const auto ci = col("source_id"), cp = col("path"), cl = col("label");
      if (ci < 0 || cp < 0) throw ParseError("dataset list needs source_id and path columns");
      for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw ParseError("ragged rows");
        DatasetEntry e;
        e.source_id = row[static_cast<std::size_t>(ci)];
        const fs::path p(row[static_cast<std::size_t>(cp)]);
        e.path = p.is_absolute() ? p : list.parent_path() / p;
        if (cl >= 0 && !io::trim(row[static_cast<std::size_t>(cl)]).empty())
          e.label = static_cast<int>(io::parse_int(row[static_cast<std::size_t>(cl)]));
        out.push_back(std::move(e));
      }
      return 0;
    });
  } else if (!cfg.input.empty()) {
    out.push_back({fs::path(cfg.input).stem().string(), cfg.input, -1});
  } else {
    throw StageError("ingest", "", "no input: set dataset or input");
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.source_id < y.source_id; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& id = out[i].source_id;
    if (id.empty() || id.find_first_of("/\\,") != std::string::npos)
      throw StageError("ingest", cfg.dataset, "invalid source_id '" + id + "'");
    if (i > 0 && out[i - 1].source_id == id) throw StageError("ingest", cfg.dataset, "duplicate source_id '" + id + "'");
  }
  return out;
}

signal::RawRecording read_segment(const PipelineConfig& cfg, const Manifest& m, const SegmentRef& ref) {
  const auto path = cfg.dir("segments") / (ref.stem + ".csv");
  auto rec = signal::load_recording(path, {}, m.rate);
  if (rec.channels != m.channels) throw ParseError("segment channels differ from the manifest");
  if (rec.samples() != m.window) throw ParseError("segment length differs from the manifest window");
  return rec;
}

// ---------------------------------------------------------------- stages

void stage_ingest(const PipelineConfig& cfg) {
  const auto entries = dataset_entries(cfg);
  reset_dir(cfg.dir("segments"));
  const std::size_t window = cfg.window_samples();
  std::vector<SubjectEntry> subjects(entries.size());
  parallel_for(entries.size(), cfg.threads, [&](std::size_t i) {
    const auto& e = entries[i];
    in_stage("ingest", e.path, [&] {
      auto rec = signal::load_recording(e.path, cfg.layout, cfg.rate);
      rec = signal::select_channels(rec, cfg.channels);
      if (cfg.bandpass) rec = signal::bandpass_filter(rec, cfg.band_low, cfg.band_high, cfg.order);
      const auto segs = signal::segment(rec, window, e.source_id);
      subjects[i].source_id = e.source_id;
      subjects[i].label = e.label;
      for (const auto& s : segs) {
        signal::RawRecording out{s.channels, s.data, rec.rate};
        signal::save_recording(cfg.dir("segments") / (stem_for(e.source_id, s.index) + ".csv"), out);
        subjects[i].segments.push_back(s.index);
      }
      return 0;
    });
  });
  Manifest m{cfg.rate, window, cfg.channels, std::move(subjects)};
  write_manifest(cfg, m);
}

void stage_embed(const PipelineConfig& cfg) {
  const auto m = read_manifest(cfg, "embed");
  const auto refs = segment_refs(m);
  reset_dir(cfg.dir("embed"));

  embed::EmbeddingParams params{cfg.m, cfg.tau};
  json pj;
  if (cfg.auto_params) {
    std::vector<signal::RawRecording> recs;
    for (const auto& ref : refs)
      if (ref.index < m.subjects[ref.subject].segments.front() + static_cast<std::size_t>(cfg.estimate_segments))
        recs.push_back(in_stage("embed", cfg.dir("segments") / (ref.stem + ".csv"), [&] { return read_segment(cfg, m, ref); }));
    if (recs.empty()) throw StageError("embed", "", "no segments to estimate parameters from");
    std::vector<std::vector<std::span<const double>>> spans;
    for (const auto& r : recs) {
      spans.emplace_back();
      for (const auto& ch : r.data) spans.back().emplace_back(ch);
    }
    embed::EstimationOptions opts;
    opts.max_lag = cfg.max_lag;
    opts.bins = cfg.bins;
    opts.m_max = cfg.m_max;
    opts.rtol = cfg.rtol;
    opts.atol = cfg.atol;
    opts.fnn_threshold = cfg.fnn_threshold;
    const auto est = in_stage("embed", manifest_path(cfg), [&] { return embed::estimate_params(spans, opts); });
    params = est.params;
    pj["channels"] = json::array();
    for (std::size_t c = 0; c < est.channels.size(); ++c)
      pj["channels"].push_back({{"name", m.channels[c]}, {"m", est.channels[c].m}, {"tau", est.channels[c].tau},
                                {"ami", est.channels[c].ami}, {"fnn", est.channels[c].fnn}});
  }
  params.validate();
  pj["m"] = params.m;
  pj["tau"] = params.tau;
  pj["estimated"] = cfg.auto_params;
  io::write_text(cfg.dir("embed") / "params.json", pj.dump(2) + "\n");

  parallel_for(refs.size(), cfg.threads, [&](std::size_t i) {
    const auto path = cfg.dir("segments") / (refs[i].stem + ".csv");
    in_stage("embed", path, [&] {
      const auto rec = read_segment(cfg, m, refs[i]);
      for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        if (params.points_for(rec.samples()) < 1) throw InvalidArgument("series too short for the embedding");
        const auto cloud = embed::delay_embed(rec.data[c], params);
        io::write_cloud(cfg.dir("embed") / (refs[i].stem + "_" + rec.channels[c] + ".csv"), cloud);
      }
      return 0;
    });
  });
}

void stage_denoise(const PipelineConfig& cfg) {
  const auto m = read_manifest(cfg, "denoise");
  const auto refs = segment_refs(m);
  reset_dir(cfg.dir("denoise"));
  parallel_for(refs.size(), cfg.threads, [&](std::size_t i) {
    std::vector<PointCloud> clouds;
    for (const auto& ch : m.channels) {
      const auto path = cfg.dir("embed") / (refs[i].stem + "_" + ch + ".csv");
      clouds.push_back(in_stage("denoise", path, [&] {
        if (!fs::exists(path)) throw IoError("missing channel cloud; run the embed stage first");
        return io::read_cloud(path);
      }));
    }
    const auto first = cfg.dir("embed") / (refs[i].stem + "_" + m.channels.front() + ".csv");
    in_stage("denoise", first, [&] {
      const std::size_t n = clouds.front().size();
      if (static_cast<std::size_t>(cfg.keep) > n)
        throw InvalidArgument("keep_n (" + std::to_string(cfg.keep) + ") exceeds cloud size (" +
                              std::to_string(n) + ")");
      dtm::MassParams mp;
      mp.q = cfg.q;
      mp.k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.k), n));
      mp.iters = cfg.iters;
      mp.seed = mix_seed(cfg.seed, i);
      const auto joint = dtm::remap_multichannel(clouds, mp, cfg.keep);
      io::write_cloud(cfg.dir("denoise") / (refs[i].stem + ".csv"), joint);
      return 0;
    });
  });
}

void stage_persist(const PipelineConfig& cfg) {
  const auto m = read_manifest(cfg, "persist");
  const auto refs = segment_refs(m);
  reset_dir(cfg.dir("diagrams"));
  parallel_for(refs.size(), cfg.threads, [&](std::size_t i) {
    const auto path = cfg.dir("denoise") / (refs[i].stem + ".csv");
    in_stage("persist", path, [&] {
      if (!fs::exists(path)) throw IoError("missing joint cloud; run the denoise stage first");
      const auto cloud = io::read_cloud(path);
      auto diagram = ph::rips_persistence(cloud);
      diagram.sort();
      io::write_diagram(cfg.dir("diagrams") / (refs[i].stem + ".csv"), diagram);
      return 0;
    });
  });
}

void stage_filter(const PipelineConfig& cfg) {
  const auto m = read_manifest(cfg, "filter");
  reset_dir(cfg.dir("filtered"));
  parallel_for(m.subjects.size(), cfg.threads, [&](std::size_t s) {
    const auto& subj = m.subjects[s];
    std::vector<PersistenceDiagram> diagrams;
    for (auto idx : subj.segments) {
      const auto path = cfg.dir("diagrams") / (stem_for(subj.source_id, idx) + ".csv");
      diagrams.push_back(in_stage("filter", path, [&] {
        if (!fs::exists(path)) throw IoError("missing diagram; run the persist stage first");
        return io::read_diagram(path);
      }));
    }
    const auto out = cfg.dir("filtered") / (subj.source_id + ".csv");
    in_stage("filter", out, [&] {
      const auto points = diagram::merge_diagrams(diagrams);
      PersistenceDiagram filtered;
      std::vector<double> density;
      if (!points.empty()) {
        const auto bw = diagram::BandwidthSpec::parse(cfg.bandwidth, points);
        density = diagram::mkde_density(points, bw);
        filtered = diagram::filter_by_density(points, density, cfg.keep_fraction);
      }
      filtered.validate();
      io::write_diagram(out, filtered);
      if (!cfg.emit_density.empty()) {
        std::string dump = "birth,death,density\n";
        for (std::size_t i = 0; i < points.size(); ++i)
          dump += io::format_double(points[i][0]) + "," + io::format_double(points[i][1]) + "," +
                  io::format_double(density[i]) + "\n";
        io::write_text(fs::path(cfg.emit_density) / (subj.source_id + "_density.csv"), dump);
      }
      return 0;
    });
  });
}

void stage_vectorize(const PipelineConfig& cfg) {
  const auto subjects = load_filtered(cfg);
  reset_dir(cfg.dir("vectorize"));
  VectorizeInfo info;
  std::vector<vec::PersistenceImage> images;
  const auto table = in_stage("vectorize", cfg.dir("filtered"),
                              [&] { return vectorize_subjects(subjects, cfg, &info, &images); });
  for (std::size_t s = 0; s < images.size(); ++s)
    io::write_matrix(cfg.dir("vectorize") / (subjects[s].source_id + "_pi.csv"), images[s].rows, images[s].cols,
                     images[s].pixels);
  json j;
  j["descriptor"] = cfg.descriptor;
  j["features"] = table.cols;
  if (cfg.descriptor == "pi") {
    const auto& e = info.image.extent;
    j["image"] = {{"rows", info.image.rows}, {"cols", info.image.cols}, {"sigma", info.image.sigma},
                  {"extent", {e.birth_lo, e.birth_hi, e.pers_lo, e.pers_hi}}};
    j["weights"] = {{"a", info.weights.a}, {"c", info.weights.c}, {"t1", info.weights.t1}, {"t2", info.weights.t2}};
  } else {
    j["grid"] = info.grid;
  }
  io::write_text(cfg.dir("vectorize") / "spec.json", j.dump(2) + "\n");
  in_stage("vectorize", cfg.features_path(), [&] {
    write_features(cfg.features_path(), table);
    return 0;
  });
}

classify::EvalReport stage_classify(const PipelineConfig& cfg) {
  const auto path = cfg.features_path();
  return in_stage("classify", path, [&] {
    if (!fs::exists(path)) throw IoError("missing features; run the vectorize stage first");
    const auto table = read_features(path);
    auto report = classify_table(table, cfg);
    io::write_text(cfg.report_path(), classify::to_json(report).dump(2) + "\n");
    return report;
  });
}

}  // namespace

// ---------------------------------------------------------------- public

std::vector<SubjectDiagram> load_filtered(const PipelineConfig& cfg) {
  const auto m = read_manifest(cfg, "vectorize");
  std::vector<SubjectDiagram> out;
  for (const auto& s : m.subjects) {
    const auto path = cfg.dir("filtered") / (s.source_id + ".csv");
    out.push_back({s.source_id, s.label, in_stage("vectorize", path, [&] {
                     if (!fs::exists(path)) throw IoError("missing filtered diagram; run the filter stage first");
                     return io::read_diagram(path);
                   })});
  }
  return out;
}

FeatureTable vectorize_subjects(std::span<const SubjectDiagram> subjects, const PipelineConfig& cfg,
                                VectorizeInfo* info, std::vector<vec::PersistenceImage>* images) {
  FeatureTable table;
  VectorizeInfo local;
  std::vector<std::vector<vec::Point2>> points;
  std::vector<vec::Point2> pooled;
  double max_death = 0.0;
  for (const auto& s : subjects) {
    PersistenceDiagram finite;
    for (const auto& f : s.diagram.features)
      if (f.dim == 1 && !f.essential()) {
        finite.features.push_back(f);
        max_death = std::max(max_death, f.death);
      }
    points.push_back(vec::birth_persistence_transform(finite));
    pooled.insert(pooled.end(), points.back().begin(), points.back().end());
  }

  if (cfg.descriptor == "pi") {
    local.image = vec::default_image_spec(pooled, static_cast<std::size_t>(cfg.pi_rows),
                                          static_cast<std::size_t>(cfg.pi_cols));
    if (cfg.sigma > 0) {
      const double old_pad = 3.0 * local.image.sigma, pad = 3.0 * cfg.sigma;
      auto& e = local.image.extent;
      if (!pooled.empty()) {
        e.birth_lo += old_pad - pad;
        e.birth_hi -= old_pad - pad;
        e.pers_lo += old_pad - pad;
        e.pers_hi -= old_pad - pad;
      }
      local.image.sigma = cfg.sigma;
    }
    double t1 = 0.0;
    if (cfg.t1) {
      t1 = *cfg.t1;
    } else {
      std::vector<double> ys;
      for (const auto& p : pooled) ys.push_back(p[1]);
      std::sort(ys.begin(), ys.end());
      if (!ys.empty())
        t1 = ys[static_cast<std::size_t>(std::floor(cfg.t1_quantile * static_cast<double>(ys.size() - 1)))];
      if (!(t1 > 0)) t1 = ys.empty() || !(ys.back() > 0) ? 1.0 : ys.back() / 2;
    }
    local.weights = {cfg.a, cfg.c, t1, cfg.t2 ? *cfg.t2 : 2.0 * t1};
    local.weights.validate();
    table.cols = local.image.rows * local.image.cols;
    for (std::size_t s = 0; s < subjects.size(); ++s) {
      auto img = vec::persistence_image(points[s], local.image, local.weights, true);
      table.values.insert(table.values.end(), img.pixels.begin(), img.pixels.end());
      if (images) images->push_back(std::move(img));
    }
  } else {
    local.grid = vec::uniform_grid(0.0, max_death > 0 ? max_death : 1.0, static_cast<std::size_t>(cfg.grid_n));
    for (const auto& s : subjects) {
      std::vector<double> f;
      if (cfg.descriptor == "landscape")
        f = vec::persistence_landscape(s.diagram, static_cast<std::size_t>(cfg.landscape_k), local.grid);
      else if (cfg.descriptor == "entropy")
        f = vec::entropy_summary(s.diagram, local.grid);
      else if (cfg.descriptor == "betti")
        f = vec::betti_curve(s.diagram, local.grid);
      else
        throw InvalidArgument("unknown descriptor '" + cfg.descriptor + "'");
      table.cols = f.size();
      table.values.insert(table.values.end(), f.begin(), f.end());
    }
  }
  for (const auto& s : subjects) {
    table.ids.push_back(s.source_id);
    table.labels.push_back(s.label);
  }
  if (info) *info = std::move(local);
  return table;
}

classify::EvalReport classify_table(const FeatureTable& table, const PipelineConfig& cfg) {
  classify::LabeledDataset data;
  data.rows = table.rows();
  data.cols = table.cols;
  data.features = table.values;
  data.labels = table.labels;
  if (cfg.permute_labels) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 0x5eed));
    for (std::size_t i = data.labels.size(); i > 1; --i) std::swap(data.labels[i - 1], data.labels[rng() % i]);
  }
  classify::CvOptions opts;
  opts.folds = cfg.folds;
  opts.seed = cfg.seed;
  opts.svm.kernel = classify::parse_kernel(cfg.kernel);
  opts.svm.C = cfg.C;
  opts.svm.gamma = cfg.gamma;
  opts.grid_search = cfg.grid_search;
  auto report = classify::kfold_cv(data, opts);
  report.label = cfg.descriptor;
  return report;
}

void write_features(const fs::path& path, const FeatureTable& table) {
  std::string out = "source_id";
  for (std::size_t c = 0; c < table.cols; ++c) out += ",f" + std::to_string(c);
  out += ",label\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += table.ids[r];
    for (std::size_t c = 0; c < table.cols; ++c) out += "," + io::format_double(table.values[r * table.cols + c]);
    out += "," + std::to_string(table.labels[r]) + "\n";
  }
  io::write_text(path, out);
}

FeatureTable read_features(const fs::path& path) {
  const auto csv = io::read_csv(path, true);
  if (csv.header.size() < 2 || csv.header.front() != "source_id" || csv.header.back() != "label")
    throw ParseError("features header must be source_id,f0..,label");
  FeatureTable t;
  t.cols = csv.header.size() - 2;
  for (const auto& row : csv.rows) {
    if (row.size() != csv.header.size()) throw ParseError("ragged rows");
    t.ids.push_back(row.front());
    for (std::size_t c = 1; c + 1 < row.size(); ++c) t.values.push_back(io::parse_double(row[c]));
    t.labels.push_back(static_cast<int>(io::parse_int(row.back())));
  }
  return t;
}

std::vector<SweepRow> sweep_weights(const PipelineConfig& config, std::span<const double> a_values,
                                    std::span<const double> c_values) {
  const auto subjects = load_filtered(config);
  std::vector<SweepRow> rows;
  for (double a : a_values)
    for (double c : c_values) {
      PipelineConfig cfg = config;
      cfg.descriptor = "pi";
      cfg.a = a;
      cfg.c = c;
      const auto table = in_stage("sweep", config.dir("filtered"), [&] { return vectorize_subjects(subjects, cfg); });
      rows.push_back({a, c, in_stage("sweep", config.dir("filtered"), [&] { return classify_table(table, cfg); })});
    }
  return rows;
}

std::string sweep_table(std::span<const SweepRow> rows) {
  std::string out = "a,c,acc,se,sp,tp,fn,fp,tn\n";
  for (const auto& r : rows) {
    const auto& m = r.report.pooled;
    const auto cnt = r.report.counts.value_or(classify::Confusion{});
    out += io::format_double(r.a) + "," + io::format_double(r.c) + "," + io::format_double(m.acc) + "," +
           io::format_double(m.se) + "," + io::format_double(m.sp) + "," + std::to_string(cnt.tp) + "," +
           std::to_string(cnt.fn) + "," + std::to_string(cnt.fp) + "," + std::to_string(cnt.tn) + "\n";
  }
  return out;
}

void run_stage(const PipelineConfig& config, std::string_view stage) {
  try {
    config.validate();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("config", "", e.what());
  }
  if (stage == "ingest") stage_ingest(config);
  else if (stage == "embed") stage_embed(config);
  else if (stage == "denoise") stage_denoise(config);
  else if (stage == "persist") stage_persist(config);
  else if (stage == "filter") stage_filter(config);
  else if (stage == "vectorize") stage_vectorize(config);
  else if (stage == "classify") stage_classify(config);
  else throw InvalidArgument("unknown stage '" + std::string(stage) + "'");
}

classify::EvalReport run_pipeline(const PipelineConfig& config) {
  for (const auto& s : kStages)
    if (s != "classify") run_stage(config, s);
  io::write_text(fs::path(config.workdir) / "config.txt", config.to_text());
  return stage_classify(config);
}

}  // namespace tdaeeg::pipeline
