/* C interface to the tdaeeg library. Every function returns a tda_status;
 * on failure tda_last_error() describes the problem (per thread). Objects
 * are opaque handles released with the matching *_free function. */
#ifndef TDAEEG_H
#define TDAEEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(TDAEEG_BUILDING_LIBRARY)
#define TDA_API __attribute__((visibility("default")))
#else
#define TDA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tda_status {
  TDA_OK = 0,
  TDA_ERR_INVALID_ARGUMENT = 1,
  TDA_ERR_IO = 2,
  TDA_ERR_PARSE = 3,
  TDA_ERR_DOMAIN = 4,
  TDA_ERR_STAGE = 5,
  TDA_ERR_INTERNAL = 99
} tda_status;

typedef struct tda_config tda_config;
typedef struct tda_cloud tda_cloud;
typedef struct tda_diagram tda_diagram;
typedef struct tda_report tda_report;

TDA_API const char* tda_version(void);
/* Message of the last failure on this thread; "" when none. */
TDA_API const char* tda_last_error(void);

/* Pipeline configuration. Keys are listed by tda_config_key. */
TDA_API tda_status tda_config_new(tda_config** out);
TDA_API void tda_config_free(tda_config* cfg);
TDA_API tda_status tda_config_load(tda_config* cfg, const char* path);
TDA_API tda_status tda_config_set(tda_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated, truncated to cap); *needed gets
 * the full length including the terminator. */
TDA_API tda_status tda_config_get(const tda_config* cfg, const char* key, char* buf, size_t cap,
                                  size_t* needed);
TDA_API size_t tda_config_key_count(void);
TDA_API const char* tda_config_key(size_t i);
TDA_API tda_status tda_config_validate(const tda_config* cfg);

/* stage: ingest | embed | denoise | persist | filter | vectorize | classify */
TDA_API tda_status tda_stage_run(const tda_config* cfg, const char* stage);
TDA_API tda_status tda_pipeline_run(const tda_config* cfg, tda_report** out);
/* Writes a CSV table (a,c,acc,se,sp,tp,fn,fp,tn) to table_path. */
TDA_API tda_status tda_sweep(const tda_config* cfg, const double* a_values, size_t a_count,
                             const double* c_values, size_t c_count, const char* table_path);

/* kind: diagram | barcode (SVG) | image (PNG) */
TDA_API tda_status tda_plot(const char* kind, const char* input, const char* output);

typedef struct tda_synth_spec {
  const char* kind; /* circle | blob | circle_plus_blob | sine | logistic | noise */
  size_t n;
  double noise_level;
  uint64_t seed;
  size_t dim;
  double radius;
  size_t blob_n;
  double blob_sigma;
  double period;
} tda_synth_spec;

typedef struct tda_two_class_spec {
  size_t subjects_per_class;
  size_t channels;
  size_t segments;
  size_t window;
  double rate;
  double period;
  double noise;
  double ar;
  uint64_t seed;
} tda_two_class_spec;

TDA_API void tda_synth_spec_default(tda_synth_spec* spec);
TDA_API void tda_two_class_spec_default(tda_two_class_spec* spec);
TDA_API tda_status tda_synth_cloud(const tda_synth_spec* spec, tda_cloud** out);
/* out must hold spec->n values. */
TDA_API tda_status tda_synth_series(const tda_synth_spec* spec, double* out);
/* Cloud kinds write a cloud CSV, series kinds a one-column recording "x". */
TDA_API tda_status tda_synth_write(const tda_synth_spec* spec, const char* path);
/* Writes recordings/ and dataset.csv under dir. */
TDA_API tda_status tda_synth_dataset(const tda_two_class_spec* spec, const char* dir);

/* Point clouds. time_index may be NULL. */
TDA_API tda_status tda_cloud_new(size_t dim, size_t n, const double* coords, const int64_t* time_index,
                                 tda_cloud** out);
TDA_API void tda_cloud_free(tda_cloud* cloud);
TDA_API tda_status tda_cloud_read(const char* path, tda_cloud** out);
TDA_API tda_status tda_cloud_write(const tda_cloud* cloud, const char* path);
TDA_API size_t tda_cloud_size(const tda_cloud* cloud);
TDA_API size_t tda_cloud_dim(const tda_cloud* cloud);
/* Row-major coordinates, valid until the cloud is freed. */
TDA_API const double* tda_cloud_coords(const tda_cloud* cloud);
TDA_API const int64_t* tda_cloud_time_index(const tda_cloud* cloud);
/* Ground-truth labels of synthetic clouds; NULL when absent. */
TDA_API const int* tda_cloud_labels(const tda_cloud* cloud);

TDA_API tda_status tda_embed(const double* series, size_t n, int m, int tau, tda_cloud** out);
TDA_API tda_status tda_dtm(const tda_cloud* cloud, const double* query, int q, double* out);
/* Keeps keep_n points with the largest k-PDTM values. */
TDA_API tda_status tda_prune(const tda_cloud* cloud, int q, int k, int iters, uint64_t seed, int keep_n,
                             tda_cloud** out);

/* max_scale <= 0 selects the cloud diameter. */
TDA_API tda_status tda_rips_persistence(const tda_cloud* cloud, double max_scale, tda_diagram** out);
TDA_API void tda_diagram_free(tda_diagram* d);
TDA_API tda_status tda_diagram_read(const char* path, tda_diagram** out);
TDA_API tda_status tda_diagram_write(const tda_diagram* d, const char* path);
TDA_API size_t tda_diagram_size(const tda_diagram* d);
TDA_API tda_status tda_diagram_feature(const tda_diagram* d, size_t i, int* dim, double* birth, double* death);
TDA_API tda_status tda_diagram_betti(const tda_diagram* d, double eps, int dim, size_t* out);

TDA_API tda_status tda_weight(double y, double a, double c, double t1, double t2, double* out);
/* Finite dim-1 features only. sigma <= 0 selects the default grid; pixels
 * receives rows*cols values, row-major, max-normalized. */
TDA_API tda_status tda_persistence_image(const tda_diagram* d, size_t rows, size_t cols, double sigma,
                                         double a, double c, double t1, double t2, double* pixels);

TDA_API tda_status tda_metrics(int64_t tp, int64_t fn, int64_t fp, int64_t tn, double* acc, double* se,
                               double* sp);
/* labels: 1 = positive (patient), 0 = control. kernel: "linear" | "rbf";
 * gamma <= 0 selects 1/cols. */
TDA_API tda_status tda_kfold_cv(const double* features, size_t rows, size_t cols, const int* labels, int folds,
                                uint64_t seed, const char* kernel, double C, double gamma, int grid_search,
                                tda_report** out);
TDA_API void tda_report_free(tda_report* r);
TDA_API tda_status tda_report_metrics(const tda_report* r, double* acc, double* se, double* sp);
/* TDA_ERR_DOMAIN when the report carries no counts. */
TDA_API tda_status tda_report_counts(const tda_report* r, int64_t* tp, int64_t* fn, int64_t* fp, int64_t* tn);
TDA_API tda_status tda_report_json(const tda_report* r, char* buf, size_t cap, size_t* needed);
TDA_API tda_status tda_report_from_json(const char* text, tda_report** out);
/* "<label> v1 v2 v3" in percent; order names the columns, e.g. "acc,sp,se". */
TDA_API tda_status tda_report_parse_row(const char* line, const char* order, tda_report** out);

#ifdef __cplusplus
}
#endif

#endif
