#include "wordeval.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wordeval/analysis.hpp"
#include "wordeval/datasets.hpp"
#include "wordeval/extrinsic.hpp"
#include "wordeval/intrinsic.hpp"
#include "wordeval/runner.hpp"
#include "wordeval/synthgen.hpp"
#include "wordeval/vecstore.hpp"

using namespace wordeval;

namespace {

thread_local std::string g_last_error = "no error";

we_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
      return WE_ERROR_IO;
    case ErrorKind::Parse:
      return WE_ERROR_PARSE;
    case ErrorKind::Invalid:
      return WE_ERROR_INVALID;
    case ErrorKind::Eval:
      return WE_ERROR_EVAL;
  }
  return WE_ERROR;
}

// Runs the body, translating exceptions into status codes + last_error.
template <typename Fn>
we_status guarded(Fn&& fn) {
  try {
    fn();
    return WE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WE_ERROR;
  } catch (...) {
    g_last_error = "unknown failure";
    return WE_ERROR;
  }
}

we_status invalid(const std::string& message) {
  g_last_error = message;
  return WE_ERROR_INVALID;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

using LoadedDataset =
    std::variant<SimilarityDataset, AnalogyDataset, CategorizationDataset,
                 OutlierDataset, LinguisticMatrix, SequenceCorpus>;

}  // namespace

struct we_store {
  VecStore impl;
};

struct we_dataset {
  LoadedDataset impl;
};

struct we_score {
  EvalScore impl;
  std::vector<std::pair<std::string, double>> components;  // stable order
};

struct we_table {
  ScoreTable impl;
};

struct we_matrix {
  CorrelationMatrix impl;
};

namespace {

we_score* wrap_score(EvalScore score) {
  auto* out = new we_score;
  out->components.assign(score.components.begin(), score.components.end());
  out->impl = std::move(score);
  return out;
}

template <typename T>
const T& dataset_as(const we_dataset* dataset, const char* evaluator) {
  const T* d = std::get_if<T>(&dataset->impl);
  if (!d) {
    throw Error(ErrorKind::Invalid,
                std::string(evaluator) + ": dataset has the wrong kind");
  }
  return *d;
}

AnalogyMethod parse_method(const char* method) {
  AnalogyMethod m;
  std::string s = method ? method : "add";
  if (s == "mul") {
    m.kind = AnalogyMethod::CosMul;
  } else if (s != "add") {
    throw Error(ErrorKind::Invalid, "unknown analogy method '" + s + "'");
  }
  return m;
}

}  // namespace

extern "C" {

const char* we_last_error(void) { return g_last_error.c_str(); }

const char* we_version(void) { return "1.0.0"; }

void we_string_free(char* s) { std::free(s); }

we_status we_store_open(const char* path, const char* format,
                        const char* oov_policy, we_store** out) {
  if (!path || !out) return invalid("we_store_open: path and out are required");
  return guarded([&]() {
    std::string fmt = format ? format : "text";
    OovPolicy policy = OovPolicy::Skip;
    if (oov_policy) {
      std::string p = oov_policy;
      if (p == "shared-unk") {
        policy = OovPolicy::SharedUnk;
      } else if (p != "skip") {
        throw Error(ErrorKind::Invalid, "unknown OOV policy '" + p + "'");
      }
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + path);
    VecStore store = [&]() {
      if (fmt == "text") return VecStore::load_text(in, TextHeader::Auto, policy);
      if (fmt == "text-header") {
        return VecStore::load_text(in, TextHeader::Present, policy);
      }
      if (fmt == "text-noheader") {
        return VecStore::load_text(in, TextHeader::Absent, policy);
      }
      if (fmt == "binary") return VecStore::load_binary(in, policy);
      throw Error(ErrorKind::Invalid, "unknown vector format '" + fmt + "'");
    }();
    *out = new we_store{std::move(store)};
  });
}

we_status we_store_save_binary(const we_store* store, const char* path) {
  if (!store || !path) return invalid("we_store_save_binary: store and path required");
  return guarded([&]() {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, std::string("cannot write ") + path);
    store->impl.save_binary(out);
  });
}

void we_store_close(we_store* store) { delete store; }

size_t we_store_size(const we_store* store) {
  return store ? store->impl.size() : 0;
}

size_t we_store_dim(const we_store* store) {
  return store ? static_cast<size_t>(store->impl.dim()) : 0;
}

const char* we_store_word(const we_store* store, size_t index) {
  if (!store || index >= store->impl.size()) return nullptr;
  return store->impl.word(index).c_str();
}

int we_store_contains(const we_store* store, const char* word) {
  if (!store || !word) return 0;
  return store->impl.find(word).has_value() ? 1 : 0;
}

we_status we_store_vector(const we_store* store, const char* word, double* out) {
  if (!store || !word || !out) return invalid("we_store_vector: bad arguments");
  return guarded([&]() {
    auto vec = store->impl.lookup(word);
    if (!vec) {
      throw Error(ErrorKind::Eval,
                  std::string("'") + word + "' is out of vocabulary");
    }
    for (Eigen::Index i = 0; i < vec->size(); ++i) {
      out[i] = (*vec)(i);
    }
  });
}

we_status we_store_normalize(we_store* store) {
  if (!store) return invalid("we_store_normalize: store required");
  return guarded([&]() { store->impl = unit_normalize(store->impl); });
}

we_status we_store_nearest(const we_store* store, const char* word, size_t k,
                           char*** words_out, double** scores_out,
                           size_t* count_out) {
  if (!store || !word || !words_out || !scores_out || !count_out) {
    return invalid("we_store_nearest: bad arguments");
  }
  return guarded([&]() {
    auto idx = store->impl.find(word);
    if (!idx) {
      throw Error(ErrorKind::Eval,
                  std::string("'") + word + "' is out of vocabulary");
    }
    auto neighbors =
        store->impl.nearest(store->impl.row(*idx).transpose(), k, {});
    char** words = static_cast<char**>(std::malloc(sizeof(char*) * neighbors.size()));
    double* scores =
        static_cast<double*>(std::malloc(sizeof(double) * neighbors.size()));
    if ((!words || !scores) && !neighbors.empty()) {
      std::free(words);
      std::free(scores);
      throw Error(ErrorKind::Invalid, "out of memory");
    }
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      words[i] = dup_string(neighbors[i].word);
      scores[i] = neighbors[i].score;
    }
    *words_out = words;
    *scores_out = scores;
    *count_out = neighbors.size();
  });
}

void we_store_neighbors_free(char** words, double* scores, size_t count) {
  if (words) {
    for (size_t i = 0; i < count; ++i) std::free(words[i]);
    std::free(words);
  }
  std::free(scores);
}

we_status we_dataset_open(const char* path, const char* kind, const char* name,
                          we_dataset** out) {
  if (!path || !kind || !out) return invalid("we_dataset_open: bad arguments");
  return guarded([&]() {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + path);
    std::string ds_name = name ? name : path;
    std::string k = kind;
    LoadedDataset ds = [&]() -> LoadedDataset {
      if (k == "similarity") return parse_similarity(in, ds_name);
      if (k == "analogy-google") {
        return parse_analogy(in, AnalogyFormat::Google, ds_name);
      }
      if (k == "analogy-msr") {
        return parse_analogy(in, AnalogyFormat::Msr4Col, ds_name);
      }
      if (k == "categorization") return parse_categorization(in, ds_name);
      if (k == "outliers-wordsim500") {
        return parse_outliers(in, OutlierFormat::WordSim500, ds_name);
      }
      if (k == "outliers-888") {
        return parse_outliers(in, OutlierFormat::Eight888, ds_name);
      }
      if (k == "linguistic") return parse_linguistic_matrix(in, ds_name);
      if (k == "conll") return parse_conll(in, ds_name);
      throw Error(ErrorKind::Invalid, "unknown dataset kind '" + k + "'");
    }();
    *out = new we_dataset{std::move(ds)};
  });
}

void we_dataset_close(we_dataset* dataset) { delete dataset; }

size_t we_dataset_items(const we_dataset* dataset) {
  if (!dataset) return 0;
  return std::visit(
      [](const auto& d) -> size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SimilarityDataset>) {
          return d.pairs.size();
        } else if constexpr (std::is_same_v<T, AnalogyDataset>) {
          return d.question_count();
        } else if constexpr (std::is_same_v<T, CategorizationDataset>) {
          return d.entries.size();
        } else if constexpr (std::is_same_v<T, OutlierDataset>) {
          return d.groups.size();
        } else if constexpr (std::is_same_v<T, LinguisticMatrix>) {
          return d.vocab.size();
        } else {
          return d.sentences.size();
        }
      },
      dataset->impl);
}

we_status we_dataset_coverage(const we_dataset* dataset, const we_store* store,
                              size_t* usable, size_t* total, double* ratio) {
  if (!dataset || !store) return invalid("we_dataset_coverage: bad arguments");
  return guarded([&]() {
    Coverage c = std::visit(
        [&](const auto& d) { return coverage(d, store->impl); }, dataset->impl);
    if (usable) *usable = c.usable_items;
    if (total) *total = c.total_items;
    if (ratio) *ratio = c.ratio;
  });
}

we_status we_eval_similarity(const we_store* store, const we_dataset* dataset,
                             we_score** out) {
  if (!store || !dataset || !out) return invalid("we_eval_similarity: bad arguments");
  return guarded([&]() {
    *out = wrap_score(eval_similarity(
        store->impl, dataset_as<SimilarityDataset>(dataset, "similarity")));
  });
}

we_status we_eval_analogy(const we_store* store, const we_dataset* dataset,
                          const char* method, we_score** out) {
  if (!store || !dataset || !out) return invalid("we_eval_analogy: bad arguments");
  return guarded([&]() {
    *out = wrap_score(eval_analogy(store->impl,
                                   dataset_as<AnalogyDataset>(dataset, "analogy"),
                                   parse_method(method)));
  });
}

we_status we_eval_categorization(const we_store* store, const we_dataset* dataset,
                                 uint64_t seed, we_score** out) {
  if (!store || !dataset || !out) {
    return invalid("we_eval_categorization: bad arguments");
  }
  return guarded([&]() {
    *out = wrap_score(eval_categorization(
        store->impl, dataset_as<CategorizationDataset>(dataset, "categorization"),
        seed, 10));
  });
}

we_status we_eval_outlier(const we_store* store, const we_dataset* dataset,
                          we_score** out) {
  if (!store || !dataset || !out) return invalid("we_eval_outlier: bad arguments");
  return guarded([&]() {
    *out = wrap_score(
        eval_outlier(store->impl, dataset_as<OutlierDataset>(dataset, "outlier")));
  });
}

we_status we_eval_qvec(const we_store* store, const we_dataset* dataset,
                       int clamp_negative, we_score** out) {
  if (!store || !dataset || !out) return invalid("we_eval_qvec: bad arguments");
  return guarded([&]() {
    *out = wrap_score(qvec(store->impl,
                           dataset_as<LinguisticMatrix>(dataset, "qvec"),
                           clamp_negative != 0));
  });
}

we_status we_eval_tagging(const we_store* store, const we_dataset* train,
                          const we_dataset* test, uint64_t seed, we_score** out) {
  if (!store || !train || !test || !out) {
    return invalid("we_eval_tagging: bad arguments");
  }
  return guarded([&]() {
    TaggerConfig config;
    config.seed = seed;
    *out = wrap_score(eval_tagging(store->impl,
                                   dataset_as<SequenceCorpus>(train, "tagging"),
                                   dataset_as<SequenceCorpus>(test, "tagging"),
                                   config));
  });
}

we_status we_solve_analogy(const we_store* store, const char* a, const char* b,
                           const char* c, const char* method, char** answer_out) {
  if (!store || !a || !b || !c || !answer_out) {
    return invalid("we_solve_analogy: bad arguments");
  }
  return guarded([&]() {
    auto answer = solve_analogy(store->impl, a, b, c, parse_method(method));
    *answer_out = answer ? dup_string(*answer) : nullptr;
  });
}

double we_score_primary(const we_score* score) {
  return score ? score->impl.primary : 0.0;
}

double we_score_coverage(const we_score* score) {
  return score ? score->impl.coverage : 0.0;
}

const char* we_score_evaluator(const we_score* score) {
  return score ? score->impl.evaluator.c_str() : "";
}

int we_score_direction(const we_score* score) {
  return score && score->impl.direction == Direction::LowerBetter ? 1 : 0;
}

size_t we_score_component_count(const we_score* score) {
  return score ? score->components.size() : 0;
}

const char* we_score_component_name(const we_score* score, size_t index) {
  if (!score || index >= score->components.size()) return nullptr;
  return score->components[index].first.c_str();
}

double we_score_component_value(const we_score* score, size_t index) {
  if (!score || index >= score->components.size()) return 0.0;
  return score->components[index].second;
}

void we_score_free(we_score* score) { delete score; }

we_status we_table_open_csv(const char* path, we_table** out) {
  if (!path || !out) return invalid("we_table_open_csv: bad arguments");
  return guarded([&]() {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, std::string("cannot open ") + path);
    *out = new we_table{read_score_table_csv(in)};
  });
}

void we_table_close(we_table* table) { delete table; }

size_t we_table_model_count(const we_table* table) {
  return table ? table->impl.models.size() : 0;
}

size_t we_table_metric_count(const we_table* table) {
  return table ? table->impl.metrics.size() : 0;
}

const char* we_table_model_name(const we_table* table, size_t i) {
  if (!table || i >= table->impl.models.size()) return nullptr;
  return table->impl.models[i].c_str();
}

const char* we_table_metric_name(const we_table* table, size_t j) {
  if (!table || j >= table->impl.metrics.size()) return nullptr;
  return table->impl.metrics[j].name.c_str();
}

int we_table_value(const we_table* table, size_t i, size_t j, double* value) {
  if (!table || i >= table->impl.models.size() ||
      j >= table->impl.metrics.size() || !table->impl.has(i, j)) {
    return 0;
  }
  if (value) *value = table->impl.values[i][j];
  return 1;
}

we_status we_consistency_matrix(const we_table* table, we_matrix** out) {
  if (!table || !out) return invalid("we_consistency_matrix: bad arguments");
  return guarded([&]() { *out = new we_matrix{consistency_matrix(table->impl)}; });
}

size_t we_matrix_rows(const we_matrix* matrix) {
  return matrix ? matrix->impl.rows.size() : 0;
}

size_t we_matrix_cols(const we_matrix* matrix) {
  return matrix ? matrix->impl.cols.size() : 0;
}

const char* we_matrix_row_name(const we_matrix* matrix, size_t i) {
  if (!matrix || i >= matrix->impl.rows.size()) return nullptr;
  return matrix->impl.rows[i].c_str();
}

const char* we_matrix_col_name(const we_matrix* matrix, size_t j) {
  if (!matrix || j >= matrix->impl.cols.size()) return nullptr;
  return matrix->impl.cols[j].c_str();
}

int we_matrix_cell(const we_matrix* matrix, size_t i, size_t j, double* r, int* n) {
  if (!matrix || i >= matrix->impl.rows.size() || j >= matrix->impl.cols.size()) {
    return 0;
  }
  if (n) *n = matrix->impl.n[i][j];
  if (!matrix->impl.present(i, j)) return 0;
  if (r) *r = matrix->impl.r[i][j];
  return 1;
}

we_status we_matrix_write(const we_matrix* matrix, const char* path,
                          const char* format) {
  if (!matrix || !path) return invalid("we_matrix_write: bad arguments");
  return guarded([&]() {
    std::string fmt = format ? format : "csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, std::string("cannot write ") + path);
    if (fmt == "csv") {
      write_matrix_csv(matrix->impl, out);
    } else if (fmt == "json") {
      write_matrix_json(matrix->impl, out);
    } else {
      throw Error(ErrorKind::Invalid, "unknown matrix format '" + fmt + "'");
    }
  });
}

void we_matrix_close(we_matrix* matrix) { delete matrix; }

we_status we_run_config(const char* config_path, const we_run_options* options,
                        size_t* failed_cells_out) {
  if (!config_path) return invalid("we_run_config: config_path required");
  return guarded([&]() {
    RunConfig config = load_config(config_path);
    RunOptions run_options;
    if (options) {
      if (options->output_dir) run_options.output_dir = options->output_dir;
      if (options->seed >= 0) {
        run_options.seed = static_cast<std::uint64_t>(options->seed);
      }
      if (options->jobs > 0) {
        run_options.jobs = static_cast<std::size_t>(options->jobs);
      }
      run_options.with_correlation = options->eval_only == 0;
      if (options->formats) {
        std::vector<std::string> formats;
        std::stringstream ss(options->formats);
        std::string f;
        while (std::getline(ss, f, ',')) {
          if (!f.empty()) formats.push_back(f);
        }
        run_options.report_formats = formats;
      }
    }
    ReportBundle bundle = run(config, run_options);
    if (failed_cells_out) *failed_cells_out = bundle.failed_cells;
  });
}

we_status we_generate_fixture(const char* structure, const char* params_json,
                              const char* out_dir, char** files_out) {
  if (!structure || !out_dir) {
    return invalid("we_generate_fixture: structure and out_dir required");
  }
  return guarded([&]() {
    nlohmann::json params = nlohmann::json::object();
    if (params_json && *params_json) {
      try {
        params = nlohmann::json::parse(params_json);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Invalid,
                    std::string("params is not valid JSON: ") + e.what());
      }
    }
    PlantedSpec spec;
    spec.seed = params.value("seed", 0ull);
    spec.vocab_size = params.value("vocab_size", std::size_t{100});
    spec.dim = static_cast<Eigen::Index>(params.value("dim", 50));

    std::string s = structure;
    if (s == "random") {
      spec.structure = RandomVectors{};
    } else if (s == "similarity-monotone") {
      SimilarityMonotone cfg;
      cfg.pairs = params.value("pairs", cfg.pairs);
      spec.structure = cfg;
    } else if (s == "analogy-offsets") {
      AnalogyOffsets cfg;
      cfg.relations = params.value("relations", cfg.relations);
      cfg.questions = params.value("questions", cfg.questions);
      spec.structure = cfg;
    } else if (s == "blobs") {
      Blobs cfg;
      cfg.k = params.value("k", cfg.k);
      cfg.separation = params.value("separation", cfg.separation);
      spec.structure = cfg;
    } else if (s == "outlier-groups") {
      OutlierGroups cfg;
      cfg.groups = params.value("groups", cfg.groups);
      cfg.group_size = params.value("group_size", cfg.group_size);
      spec.structure = cfg;
    } else if (s == "separable-tagging") {
      SeparableTagging cfg;
      cfg.sentences = params.value("sentences", cfg.sentences);
      spec.structure = cfg;
    } else {
      throw Error(ErrorKind::Invalid, "unknown structure '" + s + "'");
    }

    GeneratedFixture fixture = generate(spec);
    std::vector<std::string> files = write_fixture(fixture, out_dir);
    if (files_out) {
      std::string joined;
      for (std::size_t i = 0; i < files.size(); ++i) {
        if (i) joined += '\n';
        joined += files[i];
      }
      *files_out = dup_string(joined);
    }
  });
}

} /* extern "C" */
