#include "tdaeeg/tdaeeg.h"

#include <cstring>
#include <fstream>
#include <string>

#include "json.hpp"
#include "tdaeeg/classify.hpp"
#include "tdaeeg/dtm.hpp"
#include "tdaeeg/embedding.hpp"
#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"
#include "tdaeeg/pipeline.hpp"
#include "tdaeeg/plot.hpp"
#include "tdaeeg/rips.hpp"
#include "tdaeeg/synth.hpp"
#include "tdaeeg/vectorize.hpp"

struct tda_config {
  tdaeeg::pipeline::PipelineConfig value;
};
struct tda_cloud {
  tdaeeg::PointCloud value;
  std::vector<int> labels;
};
struct tda_diagram {
  tdaeeg::PersistenceDiagram value;
};
struct tda_report {
  tdaeeg::classify::EvalReport value;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
tda_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TDA_OK;
  } catch (const tdaeeg::Error& e) {
    g_last_error = e.what();
    return static_cast<tda_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TDA_ERR_INTERNAL;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return TDA_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TDA_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (!p) throw tdaeeg::InvalidArgument(std::string(name) + " is null");
}

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

tdaeeg::synth::SynthSpec to_spec(const tda_synth_spec* s) {
  need(s, "spec");
  need(s->kind, "spec kind");
  tdaeeg::synth::SynthSpec out;
  out.kind = tdaeeg::synth::parse_kind(s->kind);
  out.n = s->n;
  out.noise_level = s->noise_level;
  out.seed = s->seed;
  out.dim = s->dim;
  out.radius = s->radius;
  out.blob_n = s->blob_n;
  out.blob_sigma = s->blob_sigma;
  out.period = s->period;
  return out;
}

}  // namespace

extern "C" {

const char* tda_version(void) { return "1.0.0"; }

const char* tda_last_error(void) { return g_last_error.c_str(); }

tda_status tda_config_new(tda_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new tda_config{};
  });
}

void tda_config_free(tda_config* cfg) { delete cfg; }

tda_status tda_config_load(tda_config* cfg, const char* path) {
  return guarded([&] {
    need(cfg, "config");
    need(path, "path");
    cfg->value.load(path);
  });
}

tda_status tda_config_set(tda_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->value.set(key, value);
  });
}

tda_status tda_config_get(const tda_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    copy_out(cfg->value.get(key), buf, cap, needed);
  });
}

size_t tda_config_key_count(void) { return tdaeeg::pipeline::PipelineConfig::keys().size(); }

const char* tda_config_key(size_t i) {
  static const auto keys = tdaeeg::pipeline::PipelineConfig::keys();
  return i < keys.size() ? keys[i].c_str() : nullptr;
}

tda_status tda_config_validate(const tda_config* cfg) {
  return guarded([&] {
    need(cfg, "config");
    cfg->value.validate();
  });
}

tda_status tda_stage_run(const tda_config* cfg, const char* stage) {
  return guarded([&] {
    need(cfg, "config");
    need(stage, "stage");
    tdaeeg::pipeline::run_stage(cfg->value, stage);
  });
}

tda_status tda_pipeline_run(const tda_config* cfg, tda_report** out) {
  return guarded([&] {
    need(cfg, "config");
    auto report = tdaeeg::pipeline::run_pipeline(cfg->value);
    if (out) *out = new tda_report{std::move(report)};
  });
}

tda_status tda_sweep(const tda_config* cfg, const double* a_values, size_t a_count, const double* c_values,
                     size_t c_count, const char* table_path) {
  return guarded([&] {
    need(cfg, "config");
    need(table_path, "table path");
    if (a_count && !a_values) throw tdaeeg::InvalidArgument("a values are null");
    if (c_count && !c_values) throw tdaeeg::InvalidArgument("c values are null");
    const auto rows = tdaeeg::pipeline::sweep_weights(cfg->value, {a_values, a_count}, {c_values, c_count});
    tdaeeg::io::write_text(table_path, tdaeeg::pipeline::sweep_table(rows));
  });
}

tda_status tda_plot(const char* kind, const char* input, const char* output) {
  return guarded([&] {
    need(kind, "kind");
    need(input, "input");
    need(output, "output");
    tdaeeg::plot::plot_file(kind, input, output);
  });
}

void tda_synth_spec_default(tda_synth_spec* spec) {
  if (!spec) return;
  const tdaeeg::synth::SynthSpec d;
  *spec = {"circle", d.n, d.noise_level, d.seed, d.dim, d.radius, d.blob_n, d.blob_sigma, d.period};
}

void tda_two_class_spec_default(tda_two_class_spec* spec) {
  if (!spec) return;
  const tdaeeg::synth::TwoClassSpec d;
  *spec = {d.subjects_per_class, d.channels, d.segments, d.window, d.rate, d.period, d.noise, d.ar, d.seed};
}

tda_status tda_synth_cloud(const tda_synth_spec* spec, tda_cloud** out) {
  return guarded([&] {
    need(out, "out");
    auto lc = tdaeeg::synth::gen_cloud(to_spec(spec));
    *out = new tda_cloud{std::move(lc.cloud), std::move(lc.labels)};
  });
}

tda_status tda_synth_series(const tda_synth_spec* spec, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto x = tdaeeg::synth::gen_series(to_spec(spec));
    std::copy(x.begin(), x.end(), out);
  });
}

tda_status tda_synth_write(const tda_synth_spec* spec, const char* path) {
  return guarded([&] {
    need(path, "path");
    const auto s = to_spec(spec);
    if (tdaeeg::synth::is_series(s.kind) || (s.kind == tdaeeg::synth::Kind::noise && s.dim == 1)) {
      const auto x = tdaeeg::synth::gen_series(s);
      std::string text = "x\n";
      for (double v : x) text += tdaeeg::io::format_double(v) + "\n";
      tdaeeg::io::write_text(path, text);
    } else {
      tdaeeg::io::write_cloud(path, tdaeeg::synth::gen_cloud(s).cloud);
    }
  });
}

tda_status tda_synth_dataset(const tda_two_class_spec* spec, const char* dir) {
  return guarded([&] {
    need(spec, "spec");
    need(dir, "dir");
    tdaeeg::synth::TwoClassSpec s;
    s.subjects_per_class = spec->subjects_per_class;
    s.channels = spec->channels;
    s.segments = spec->segments;
    s.window = spec->window;
    s.rate = spec->rate;
    s.period = spec->period;
    s.noise = spec->noise;
    s.ar = spec->ar;
    s.seed = spec->seed;
    tdaeeg::synth::write_two_class_dataset(s, dir);
  });
}

tda_status tda_cloud_new(size_t dim, size_t n, const double* coords, const int64_t* time_index, tda_cloud** out) {
  return guarded([&] {
    need(out, "out");
    if (n && !coords) throw tdaeeg::InvalidArgument("coords are null");
    tdaeeg::PointCloud c(dim, std::vector<double>(coords, coords + n * dim));
    if (time_index) c.time_index.assign(time_index, time_index + n);
    c.validate();
    *out = new tda_cloud{std::move(c), {}};
  });
}

void tda_cloud_free(tda_cloud* cloud) { delete cloud; }

tda_status tda_cloud_read(const char* path, tda_cloud** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tda_cloud{tdaeeg::io::read_cloud(path), {}};
  });
}

tda_status tda_cloud_write(const tda_cloud* cloud, const char* path) {
  return guarded([&] {
    need(cloud, "cloud");
    need(path, "path");
    tdaeeg::io::write_cloud(path, cloud->value);
  });
}

size_t tda_cloud_size(const tda_cloud* cloud) { return cloud ? cloud->value.size() : 0; }
size_t tda_cloud_dim(const tda_cloud* cloud) { return cloud ? cloud->value.dim : 0; }
const double* tda_cloud_coords(const tda_cloud* cloud) { return cloud ? cloud->value.coords.data() : nullptr; }
const int64_t* tda_cloud_time_index(const tda_cloud* cloud) {
  return cloud && !cloud->value.time_index.empty() ? cloud->value.time_index.data() : nullptr;
}
const int* tda_cloud_labels(const tda_cloud* cloud) {
  return cloud && !cloud->labels.empty() ? cloud->labels.data() : nullptr;
}

tda_status tda_embed(const double* series, size_t n, int m, int tau, tda_cloud** out) {
  return guarded([&] {
    need(out, "out");
    if (n && !series) throw tdaeeg::InvalidArgument("series is null");
    *out = new tda_cloud{tdaeeg::embed::delay_embed({series, n}, {m, tau}), {}};
  });
}

tda_status tda_dtm(const tda_cloud* cloud, const double* query, int q, double* out) {
  return guarded([&] {
    need(cloud, "cloud");
    need(query, "query");
    need(out, "out");
    *out = tdaeeg::dtm::dtm(cloud->value, {query, cloud->value.dim}, q);
  });
}

tda_status tda_prune(const tda_cloud* cloud, int q, int k, int iters, uint64_t seed, int keep_n, tda_cloud** out) {
  return guarded([&] {
    need(cloud, "cloud");
    need(out, "out");
    tdaeeg::dtm::MassParams p;
    p.q = q;
    p.k = k;
    p.iters = iters;
    p.seed = seed;
    *out = new tda_cloud{tdaeeg::dtm::prune_cloud(cloud->value, p, keep_n), {}};
  });
}

tda_status tda_rips_persistence(const tda_cloud* cloud, double max_scale, tda_diagram** out) {
  return guarded([&] {
    need(cloud, "cloud");
    need(out, "out");
    auto d = tdaeeg::ph::rips_persistence(cloud->value, max_scale);
    d.sort();
    *out = new tda_diagram{std::move(d)};
  });
}

void tda_diagram_free(tda_diagram* d) { delete d; }

tda_status tda_diagram_read(const char* path, tda_diagram** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tda_diagram{tdaeeg::io::read_diagram(path)};
  });
}

tda_status tda_diagram_write(const tda_diagram* d, const char* path) {
  return guarded([&] {
    need(d, "diagram");
    need(path, "path");
    tdaeeg::io::write_diagram(path, d->value);
  });
}

size_t tda_diagram_size(const tda_diagram* d) { return d ? d->value.size() : 0; }

tda_status tda_diagram_feature(const tda_diagram* d, size_t i, int* dim, double* birth, double* death) {
  return guarded([&] {
    need(d, "diagram");
    if (i >= d->value.size()) throw tdaeeg::InvalidArgument("feature index out of range");
    const auto& f = d->value.features[i];
    if (dim) *dim = f.dim;
    if (birth) *birth = f.birth;
    if (death) *death = f.death;
  });
}

tda_status tda_diagram_betti(const tda_diagram* d, double eps, int dim, size_t* out) {
  return guarded([&] {
    need(d, "diagram");
    need(out, "out");
    if (!(eps >= 0)) throw tdaeeg::InvalidArgument("eps must be >= 0");
    *out = tdaeeg::ph::betti_at(d->value, eps, dim);
  });
}

tda_status tda_weight(double y, double a, double c, double t1, double t2, double* out) {
  return guarded([&] {
    need(out, "out");
    tdaeeg::vec::WeightParams p{a, c, t1, t2};
    p.validate();
    *out = tdaeeg::vec::weight_fn(y, p);
  });
}

tda_status tda_persistence_image(const tda_diagram* d, size_t rows, size_t cols, double sigma, double a, double c,
                                 double t1, double t2, double* pixels) {
  return guarded([&] {
    need(d, "diagram");
    need(pixels, "pixels");
    tdaeeg::PersistenceDiagram finite;
    for (const auto& f : d->value.features)
      if (f.dim == 1 && !f.essential()) finite.features.push_back(f);
    const auto pts = tdaeeg::vec::birth_persistence_transform(finite);
    auto spec = tdaeeg::vec::default_image_spec(pts, rows, cols);
    if (sigma > 0) spec.sigma = sigma;
    const auto img = tdaeeg::vec::persistence_image(pts, spec, {a, c, t1, t2}, true);
    std::copy(img.pixels.begin(), img.pixels.end(), pixels);
  });
}

tda_status tda_metrics(int64_t tp, int64_t fn, int64_t fp, int64_t tn, double* acc, double* se, double* sp) {
  return guarded([&] {
    const auto m = tdaeeg::classify::metrics(tp, fn, fp, tn);
    if (acc) *acc = m.acc;
    if (se) *se = m.se;
    if (sp) *sp = m.sp;
  });
}

tda_status tda_kfold_cv(const double* features, size_t rows, size_t cols, const int* labels, int folds,
                        uint64_t seed, const char* kernel, double C, double gamma, int grid_search,
                        tda_report** out) {
  return guarded([&] {
    need(out, "out");
    need(kernel, "kernel");
    if (rows && (!features || !labels)) throw tdaeeg::InvalidArgument("features or labels are null");
    tdaeeg::classify::LabeledDataset data;
    data.rows = rows;
    data.cols = cols;
    data.features.assign(features, features + rows * cols);
    data.labels.assign(labels, labels + rows);
    tdaeeg::classify::CvOptions opts;
    opts.folds = folds;
    opts.seed = seed;
    opts.svm.kernel = tdaeeg::classify::parse_kernel(kernel);
    opts.svm.C = C;
    opts.svm.gamma = gamma;
    opts.grid_search = grid_search != 0;
    *out = new tda_report{tdaeeg::classify::kfold_cv(data, opts)};
  });
}

void tda_report_free(tda_report* r) { delete r; }

tda_status tda_report_metrics(const tda_report* r, double* acc, double* se, double* sp) {
  return guarded([&] {
    need(r, "report");
    if (acc) *acc = r->value.pooled.acc;
    if (se) *se = r->value.pooled.se;
    if (sp) *sp = r->value.pooled.sp;
  });
}

tda_status tda_report_counts(const tda_report* r, int64_t* tp, int64_t* fn, int64_t* fp, int64_t* tn) {
  return guarded([&] {
    need(r, "report");
    if (!r->value.counts) throw tdaeeg::DomainError("report carries no confusion counts");
    const auto& c = *r->value.counts;
    if (tp) *tp = c.tp;
    if (fn) *fn = c.fn;
    if (fp) *fp = c.fp;
    if (tn) *tn = c.tn;
  });
}

tda_status tda_report_json(const tda_report* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(r, "report");
    copy_out(tdaeeg::classify::to_json(r->value).dump(2), buf, cap, needed);
  });
}

tda_status tda_report_from_json(const char* text, tda_report** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw tdaeeg::ParseError(std::string("malformed report JSON: ") + e.what());
    }
    *out = new tda_report{tdaeeg::classify::report_from_json(j)};
  });
}

tda_status tda_report_parse_row(const char* line, const char* order, tda_report** out) {
  return guarded([&] {
    need(line, "line");
    need(out, "out");
    *out = new tda_report{tdaeeg::classify::parse_metrics_row(line, order ? order : "acc,sp,se")};
  });
}

}  // extern "C"
