/*
 * wordeval — C API for the word-embedding evaluation toolkit.
 *
 * Every function that can fail returns a we_status; WE_OK is 0. On failure
 * we_last_error() returns a thread-local message describing what went wrong.
 * Objects are opaque handles created by *_open / *_load functions and
 * released with the matching *_close / *_free function.
 */
#ifndef WORDEVAL_H
#define WORDEVAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum we_status {
  WE_OK = 0,
  WE_ERROR = 1,         /* unexpected internal failure */
  WE_ERROR_IO = 2,      /* unreadable or unwritable file */
  WE_ERROR_PARSE = 3,   /* malformed input data */
  WE_ERROR_INVALID = 4, /* bad argument, config or precondition */
  WE_ERROR_EVAL = 5,    /* evaluator could not produce a score */
} we_status;

/* Message for the most recent failure on this thread; never NULL. */
const char* we_last_error(void);
const char* we_version(void);

void we_string_free(char* s);

/* ---- vector stores ---------------------------------------------------- */

typedef struct we_store we_store;

/* format: "text" (sniff header), "text-header", "text-noheader", "binary".
 * oov_policy: "skip" or "shared-unk". */
we_status we_store_open(const char* path, const char* format,
                        const char* oov_policy, we_store** out);
we_status we_store_save_binary(const we_store* store, const char* path);
void we_store_close(we_store* store);

size_t we_store_size(const we_store* store);
size_t we_store_dim(const we_store* store);
/* Word at a vocabulary index; NULL when out of range. The pointer stays
 * valid for the lifetime of the store. */
const char* we_store_word(const we_store* store, size_t index);
int we_store_contains(const we_store* store, const char* word);
/* Copies the word's vector into out[0..dim); WE_ERROR_EVAL when the word is
 * out of vocabulary under the skip policy. */
we_status we_store_vector(const we_store* store, const char* word, double* out);
/* Replaces the store contents with a unit-normalized copy. */
we_status we_store_normalize(we_store* store);

/* Top-k neighbors of a word by cosine. Caller frees words_out with
 * we_store_neighbors_free. */
we_status we_store_nearest(const we_store* store, const char* word, size_t k,
                           char*** words_out, double** scores_out,
                           size_t* count_out);
void we_store_neighbors_free(char** words, double* scores, size_t count);

/* ---- gold datasets ----------------------------------------------------- */

typedef struct we_dataset we_dataset;

/* kind: "similarity", "analogy-google", "analogy-msr", "categorization",
 * "outliers-wordsim500", "outliers-888", "linguistic", "conll". */
we_status we_dataset_open(const char* path, const char* kind, const char* name,
                          we_dataset** out);
void we_dataset_close(we_dataset* dataset);
size_t we_dataset_items(const we_dataset* dataset);
we_status we_dataset_coverage(const we_dataset* dataset, const we_store* store,
                              size_t* usable, size_t* total, double* ratio);

/* ---- evaluators --------------------------------------------------------- */

typedef struct we_score we_score;

we_status we_eval_similarity(const we_store* store, const we_dataset* dataset,
                             we_score** out);
/* method: "add" (3CosAdd) or "mul" (3CosMul). */
we_status we_eval_analogy(const we_store* store, const we_dataset* dataset,
                          const char* method, we_score** out);
we_status we_eval_categorization(const we_store* store, const we_dataset* dataset,
                                 uint64_t seed, we_score** out);
we_status we_eval_outlier(const we_store* store, const we_dataset* dataset,
                          we_score** out);
we_status we_eval_qvec(const we_store* store, const we_dataset* dataset,
                       int clamp_negative, we_score** out);
we_status we_eval_tagging(const we_store* store, const we_dataset* train,
                          const we_dataset* test, uint64_t seed, we_score** out);

/* Single analogy query "a : b :: c : ?". *answer_out is NULL when the
 * question is unanswerable (query word out of vocabulary); otherwise a
 * malloc'd string the caller releases with we_string_free. */
we_status we_solve_analogy(const we_store* store, const char* a, const char* b,
                           const char* c, const char* method, char** answer_out);

double we_score_primary(const we_score* score);
double we_score_coverage(const we_score* score);
const char* we_score_evaluator(const we_score* score);
/* 0 = higher is better, 1 = lower is better. */
int we_score_direction(const we_score* score);
size_t we_score_component_count(const we_score* score);
const char* we_score_component_name(const we_score* score, size_t index);
double we_score_component_value(const we_score* score, size_t index);
void we_score_free(we_score* score);

/* ---- correlation analysis ---------------------------------------------- */

typedef struct we_table we_table;
typedef struct we_matrix we_matrix;

/* Long-form score table CSV: model,metric,kind,direction,value. */
we_status we_table_open_csv(const char* path, we_table** out);
void we_table_close(we_table* table);

size_t we_table_model_count(const we_table* table);
size_t we_table_metric_count(const we_table* table);
const char* we_table_model_name(const we_table* table, size_t i);
const char* we_table_metric_name(const we_table* table, size_t j);
/* Returns 1 and fills value when present, 0 when the entry is missing. */
int we_table_value(const we_table* table, size_t i, size_t j, double* value);

we_status we_consistency_matrix(const we_table* table, we_matrix** out);
size_t we_matrix_rows(const we_matrix* matrix);
size_t we_matrix_cols(const we_matrix* matrix);
const char* we_matrix_row_name(const we_matrix* matrix, size_t i);
const char* we_matrix_col_name(const we_matrix* matrix, size_t j);
/* Returns 1 and fills r/n when the cell is present, 0 when absent. */
int we_matrix_cell(const we_matrix* matrix, size_t i, size_t j, double* r, int* n);
/* format: "csv" or "json". */
we_status we_matrix_write(const we_matrix* matrix, const char* path,
                          const char* format);
void we_matrix_close(we_matrix* matrix);

/* ---- orchestrated runs -------------------------------------------------- */

typedef struct we_run_options {
  const char* output_dir; /* NULL = value from the config */
  int64_t seed;           /* negative = value from the config */
  int jobs;               /* 0 = WORDEVAL_JOBS env var, else hardware */
  int eval_only;          /* nonzero skips the consistency matrix */
  const char* formats;    /* comma-separated "csv,json"; NULL = config */
} we_run_options;

/* Runs the JSON run-config end to end and writes the report bundle.
 * failed_cells_out (optional) receives the number of evaluation cells that
 * recorded an error; the run itself still succeeds in that case. */
we_status we_run_config(const char* config_path, const we_run_options* options,
                        size_t* failed_cells_out);

/* ---- synthetic fixtures -------------------------------------------------- */

/* structure: "random", "similarity-monotone", "analogy-offsets", "blobs",
 * "outlier-groups", "separable-tagging". params_json tunes the structure
 * (see the README); writes vectors plus gold files into out_dir and, when
 * files_out is non-NULL, returns a newline-joined list of file names. */
we_status we_generate_fixture(const char* structure, const char* params_json,
                              const char* out_dir, char** files_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WORDEVAL_H */
