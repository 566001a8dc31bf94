/* AddNet: reconfigurable constant-coefficient multiplier toolkit.
 *
 * C API over the core library: multiplier evaluation, coefficient-set
 * enumeration, KL distribution matching, quantization-aware training on
 * built-in tasks, FPGA cost estimation, and netlist export. Handles are
 * opaque; every fallible call returns an addnet_status and leaves a
 * thread-local message readable via addnet_last_error().
 */
#ifndef ADDNET_H
#define ADDNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum addnet_status {
    ADDNET_OK = 0,
    ADDNET_ERR_INVALID_ARGUMENT = 1,
    ADDNET_ERR_OUT_OF_RANGE = 2,
    ADDNET_ERR_NOT_FOUND = 3,
    ADDNET_ERR_DATA = 4,
    ADDNET_ERR_IO = 5,
    ADDNET_ERR_PARSE = 6,
    ADDNET_ERR_INTERNAL = 7
} addnet_status;

typedef enum addnet_arch {
    ADDNET_ARCH_2ADD = 0,
    ADDNET_ARCH_3ADD = 1,
    ADDNET_ARCH_4ADD = 2
} addnet_arch;

const char* addnet_version(void);
/* Message describing the most recent failure on this thread. */
const char* addnet_last_error(void);

/* ---------- multiplier configurations ---------- */

typedef struct addnet_config addnet_config;

/* The shipped distribution-matched configuration for an architecture. */
addnet_status addnet_config_optimized(addnet_arch arch, addnet_config** out);
/* cells_a: one (mapping, shift1..shift4) group of 5 ints per type-A cell
 * (1 / 2 / 3 cells for 2add / 3add / 4add); cell_b: 3 shifts. */
addnet_status addnet_config_create(addnet_arch arch, const int* cells_a, const int* cell_b,
                                   addnet_config** out);
void addnet_config_destroy(addnet_config* cfg);

int addnet_config_select_width(const addnet_config* cfg);
/* y = c_select * x */
addnet_status addnet_config_eval(const addnet_config* cfg, uint32_t select, int64_t x,
                                 int64_t* out);
addnet_status addnet_config_coefficient(const addnet_config* cfg, uint32_t select, int64_t* out);
/* Sorted distinct coefficient set. Query the size with buf == NULL. */
addnet_status addnet_config_coefficients(const addnet_config* cfg, int32_t* buf, size_t cap,
                                         size_t* count);
/* Smallest select reaching `coefficient`; ADDNET_ERR_NOT_FOUND otherwise. */
addnet_status addnet_config_select_for(const addnet_config* cfg, int64_t coefficient,
                                       uint32_t* select);

/* ---------- enumeration and catalogs ---------- */

typedef struct addnet_catalog addnet_catalog;
typedef void (*addnet_progress_fn)(uint64_t done, uint64_t total, void* user);

typedef struct addnet_enumerate_options {
    int phi_max;                  /* 0 = default (3) */
    unsigned threads;             /* 0 = hardware concurrency */
    uint64_t memory_cap_bytes;    /* 0 = default (4 GiB); dedup spills past it */
    const char* spill_dir;        /* NULL = system temp directory */
    addnet_progress_fn progress;  /* optional */
    void* progress_user;
} addnet_enumerate_options;

void addnet_enumerate_defaults(addnet_enumerate_options* opt);

/* All unique coefficient sets reachable by an architecture. */
addnet_status addnet_enumerate(addnet_arch arch, const addnet_enumerate_options* opt,
                               addnet_catalog** out);
/* Unique / staged-candidate counts without materializing a catalog. */
addnet_status addnet_count_sets(addnet_arch arch, const addnet_enumerate_options* opt,
                                uint64_t* unique_sets, uint64_t* candidates);
/* Streams entries straight to a catalog file (for catalogs larger than
 * memory); entry order is deterministic but only locally sorted. */
addnet_status addnet_enumerate_to_file(addnet_arch arch, const addnet_enumerate_options* opt,
                                       const char* path, uint64_t* unique_sets);

addnet_status addnet_catalog_load(const char* path, addnet_catalog** out);
addnet_status addnet_catalog_save(const addnet_catalog* cat, const char* path);
void addnet_catalog_destroy(addnet_catalog* cat);

size_t addnet_catalog_size(const addnet_catalog* cat);
addnet_status addnet_catalog_coefficients(const addnet_catalog* cat, size_t index, int32_t* buf,
                                          size_t cap, size_t* count);
/* 16-hex content id of an entry's coefficient list; cap must be >= 17. */
addnet_status addnet_catalog_set_id(const addnet_catalog* cat, size_t index, char* buf,
                                    size_t cap);
addnet_status addnet_catalog_config(const addnet_catalog* cat, size_t index,
                                    addnet_config** out);
/* Exact membership of a sorted coefficient list. */
addnet_status addnet_catalog_find(const addnet_catalog* cat, const int32_t* coefficients,
                                  size_t n, int* found, size_t* index);

/* ---------- weights and histograms ---------- */

typedef struct addnet_weights addnet_weights;
typedef struct addnet_histogram addnet_histogram;

addnet_status addnet_weights_create(addnet_weights** out);
addnet_status addnet_weights_add(addnet_weights* w, const char* name, const uint32_t* shape,
                                 size_t rank, const float* values);
addnet_status addnet_weights_load(const char* path, addnet_weights** out);
addnet_status addnet_weights_save(const addnet_weights* w, const char* path);
void addnet_weights_destroy(addnet_weights* w);
size_t addnet_weights_count(const addnet_weights* w);

/* Pools every layer's values into one symmetric histogram. */
addnet_status addnet_histogram_build(const addnet_weights* w, int bins, addnet_histogram** out);
void addnet_histogram_destroy(addnet_histogram* h);
addnet_status addnet_histogram_counts(const addnet_histogram* h, uint64_t* buf, size_t cap,
                                      size_t* bins);

/* ---------- distribution matching ---------- */

typedef struct addnet_match_result addnet_match_result;

addnet_status addnet_match(const addnet_catalog* cat, const addnet_histogram* h,
                           addnet_match_result** out);
void addnet_match_result_destroy(addnet_match_result* m);
size_t addnet_match_ranked_count(const addnet_match_result* m);
/* rank -> (catalog entry index, divergence) */
addnet_status addnet_match_ranked(const addnet_match_result* m, size_t rank, size_t* entry,
                                  double* score);
size_t addnet_match_chosen(const addnet_match_result* m);
addnet_status addnet_match_save(const addnet_catalog* cat, const addnet_match_result* m,
                                const char* path, const char* csv_path_or_null);

/* Divergence of one coefficient list against a histogram. */
addnet_status addnet_kl_score(const addnet_histogram* h, const int32_t* coefficients, size_t n,
                              double eps, double* out);

/* ---------- quantization and index encoding ---------- */

typedef struct addnet_encoded addnet_encoded;

/* Quantizes every layer against the config's coefficient set (clip = the
 * layer's max |w|, lambda = clip / max coefficient) and packs the
 * select-index stream at select-width bits per weight. */
addnet_status addnet_quantize_weights(const addnet_weights* w, const addnet_config* cfg,
                                      addnet_encoded** out);
addnet_status addnet_encoded_save(const addnet_encoded* e, const char* path);
addnet_status addnet_encoded_load(const char* path, addnet_encoded** out);
void addnet_encoded_destroy(addnet_encoded* e);
size_t addnet_encoded_count(const addnet_encoded* e);
/* Reconstructs quantized values (lambda * coefficient) as float32 layers. */
addnet_status addnet_encoded_decode(const addnet_encoded* e, addnet_weights** out);

/* Scalar quantizers. */
addnet_status addnet_quantize_value(const addnet_config* cfg, double lambda, double clip,
                                    double w, double* value, uint32_t* select);
addnet_status addnet_activation_quantize(double x, int total_bits, int frac_bits, double* out);

/* ---------- training ---------- */

typedef struct addnet_train_result addnet_train_result;

typedef struct addnet_train_options {
    const char* task;  /* "blobs" or "digits" */
    uint32_t classes;
    uint32_t train_samples;
    uint32_t test_samples;
    uint32_t dim;     /* blobs feature count */
    uint32_t hidden;  /* MLP hidden width */
    uint32_t epochs;
    uint32_t batch;
    double lr;
    double lr_decay;
    double momentum;
    double lambda_lr;
    uint64_t seed;
    int quantize_arch;    /* -1 = float baseline, else addnet_arch */
    int first_last_4add;  /* nonzero: first/last layers use the 4add set */
} addnet_train_options;

void addnet_train_defaults(addnet_train_options* opt);
/* Pretrains in float, then (unless quantize_arch < 0) retrains against the
 * architecture's shipped coefficient set with straight-through gradients. */
addnet_status addnet_train_run(const addnet_train_options* opt, addnet_train_result** out);
void addnet_train_result_destroy(addnet_train_result* r);
double addnet_train_final_accuracy(const addnet_train_result* r);
size_t addnet_train_epochs(const addnet_train_result* r);
addnet_status addnet_train_metric(const addnet_train_result* r, size_t epoch, double* loss,
                                  double* train_acc, double* test_acc);
/* Writes weights.bin, metrics.txt and (when quantized) encoded.bin. */
addnet_status addnet_train_save(const addnet_train_result* r, const char* dir);

/* ---------- cost model ---------- */

typedef enum addnet_mult_kind {
    ADDNET_MULT_GENERIC = 0,
    ADDNET_MULT_2ADD = 1,
    ADDNET_MULT_3ADD = 2,
    ADDNET_MULT_4ADD = 3
} addnet_mult_kind;

addnet_status addnet_lut_cost(addnet_mult_kind kind, int w_in, double* luts, int* extrapolated);
int addnet_index_bits(addnet_mult_kind kind);
/* 36 Kb BRAM units (0.5 granularity) for one PE's weight buffer. */
addnet_status addnet_bram_estimate(uint64_t weights_per_pe, int bits_per_weight,
                                   int parallelism, double* brams);
double addnet_layer_memory_mb(uint64_t weight_count, int bits_per_weight);

typedef struct addnet_layer_spec {
    const char* name;
    uint64_t weight_count;
    int pes;
    int parallelism;
} addnet_layer_spec;

addnet_status addnet_cost_report(const addnet_layer_spec* layers, size_t n,
                                 addnet_mult_kind kind, int w_in, const char* path,
                                 const char* csv_path_or_null);

/* ---------- netlist export ---------- */

typedef struct addnet_netlist addnet_netlist;

addnet_status addnet_netlist_export(const addnet_config* cfg, const char* path);
addnet_status addnet_netlist_load(const char* path, addnet_netlist** out);
void addnet_netlist_destroy(addnet_netlist* nl);
addnet_status addnet_netlist_simulate(const addnet_netlist* nl, uint32_t select, int64_t x,
                                      int64_t* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ADDNET_H */
