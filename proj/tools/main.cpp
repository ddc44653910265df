// wordeval command-line interface. Everything goes through the public C API
// in wordeval.h; this translation unit never touches the C++ core directly.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wordeval.h"

namespace {

// 0 success, 1 I/O or internal error, 2 config/usage error, 3 evaluation
// failure.
int exit_code_for(we_status status) {
  switch (status) {
    case WE_OK:
      return 0;
    case WE_ERROR_PARSE:
    case WE_ERROR_INVALID:
      return 2;
    case WE_ERROR_EVAL:
      return 3;
    case WE_ERROR_IO:
    case WE_ERROR:
    default:
      return 1;
  }
}

int fail(we_status status) {
  std::fprintf(stderr, "error: %s\n", we_last_error());
  return exit_code_for(status);
}

// Prints the score table the way the reference tables do: x100, 2 decimals.
void print_score_table(const char* path) {
  we_table* table = nullptr;
  if (we_table_open_csv(path, &table) != WE_OK) return;
  size_t models = we_table_model_count(table);
  size_t metrics = we_table_metric_count(table);
  std::printf("%-16s", "model");
  for (size_t j = 0; j < metrics; ++j) {
    std::printf(" %14s", we_table_metric_name(table, j));
  }
  std::printf("\n");
  for (size_t i = 0; i < models; ++i) {
    std::printf("%-16s", we_table_model_name(table, i));
    for (size_t j = 0; j < metrics; ++j) {
      double value = 0.0;
      if (we_table_value(table, i, j, &value)) {
        std::printf(" %14.2f", value * 100.0);
      } else {
        std::printf(" %14s", "-");
      }
    }
    std::printf("\n");
  }
  we_table_close(table);
}

struct CommonFlags {
  std::string out_dir;
  long long seed = -1;
  int jobs = 0;
  std::string formats;
};

int run_eval(const std::string& config, const CommonFlags& flags, bool correlate) {
  we_run_options options{};
  options.output_dir = flags.out_dir.empty() ? nullptr : flags.out_dir.c_str();
  options.seed = flags.seed;
  options.jobs = flags.jobs;
  options.eval_only = correlate ? 0 : 1;
  options.formats = flags.formats.empty() ? nullptr : flags.formats.c_str();

  size_t failed = 0;
  we_status status = we_run_config(config.c_str(), &options, &failed);
  if (status != WE_OK) return fail(status);

  std::string dir = flags.out_dir;
  if (dir.empty()) dir = "reports";  // config default; used only for display
  std::string table_path = (std::filesystem::path(dir) / "score_table.csv").string();
  if (std::filesystem::exists(table_path)) {
    print_score_table(table_path.c_str());
  }
  if (failed > 0) {
    std::fprintf(stderr, "%zu evaluation cell(s) failed; see manifest.json\n",
                 failed);
    return 3;
  }
  std::printf("reports written to %s\n", dir.c_str());
  return 0;
}

int run_correlate(const std::string& table_path, const CommonFlags& flags) {
  we_table* table = nullptr;
  we_status status = we_table_open_csv(table_path.c_str(), &table);
  if (status != WE_OK) return fail(status);

  we_matrix* matrix = nullptr;
  status = we_consistency_matrix(table, &matrix);
  we_table_close(table);
  if (status != WE_OK) return fail(status);

  std::string dir = flags.out_dir.empty() ? "." : flags.out_dir;
  std::filesystem::create_directories(dir);
  bool csv = flags.formats.empty() || flags.formats.find("csv") != std::string::npos;
  bool json = flags.formats.empty() || flags.formats.find("json") != std::string::npos;
  if (csv) {
    std::string path = (std::filesystem::path(dir) / "correlation.csv").string();
    status = we_matrix_write(matrix, path.c_str(), "csv");
    if (status != WE_OK) {
      we_matrix_close(matrix);
      return fail(status);
    }
    std::printf("wrote %s\n", path.c_str());
  }
  if (json) {
    std::string path = (std::filesystem::path(dir) / "correlation.json").string();
    status = we_matrix_write(matrix, path.c_str(), "json");
    if (status != WE_OK) {
      we_matrix_close(matrix);
      return fail(status);
    }
    std::printf("wrote %s\n", path.c_str());
  }

  size_t rows = we_matrix_rows(matrix);
  size_t cols = we_matrix_cols(matrix);
  std::printf("%-20s", "intrinsic\\extrinsic");
  for (size_t j = 0; j < cols; ++j) {
    std::printf(" %12s", we_matrix_col_name(matrix, j));
  }
  std::printf("\n");
  for (size_t i = 0; i < rows; ++i) {
    std::printf("%-20s", we_matrix_row_name(matrix, i));
    for (size_t j = 0; j < cols; ++j) {
      double r = 0.0;
      int n = 0;
      if (we_matrix_cell(matrix, i, j, &r, &n)) {
        std::printf(" %12.3f", r);
      } else {
        std::printf(" %12s", "-");
      }
    }
    std::printf("\n");
  }
  we_matrix_close(matrix);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word embedding evaluation toolkit"};
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "run the evaluations of a config");
  std::string eval_config;
  CommonFlags eval_flags;
  bool eval_correlate = false;
  eval->add_option("--config", eval_config, "run config (JSON)")->required();
  eval->add_option("--out", eval_flags.out_dir, "output directory override");
  eval->add_option("--seed", eval_flags.seed, "seed override");
  eval->add_option("--jobs", eval_flags.jobs,
                   "parallel evaluation cells (default: WORDEVAL_JOBS or cores)");
  eval->add_option("--format", eval_flags.formats, "report formats, e.g. csv,json");
  eval->add_flag("--with-correlation", eval_correlate,
                 "also emit the consistency matrix");

  // correlate
  auto* correlate = app.add_subcommand(
      "correlate", "consistency matrix from a score table CSV");
  std::string table_path;
  CommonFlags correlate_flags;
  correlate->add_option("--table", table_path, "score table CSV")->required();
  correlate->add_option("--out", correlate_flags.out_dir, "output directory");
  correlate->add_option("--format", correlate_flags.formats,
                        "matrix formats, e.g. csv,json");

  // gen-fixtures
  auto* gen = app.add_subcommand("gen-fixtures",
                                 "write synthetic vectors + gold data");
  std::string structure = "random";
  std::string gen_out = "fixtures";
  unsigned long long gen_seed = 0;
  std::size_t vocab = 100, dim = 50;
  std::size_t pairs = 50, relations = 5, questions = 500;
  std::size_t k = 3, groups = 10, group_size = 8, sentences = 100;
  double separation = 10.0;
  gen->add_option("--structure", structure,
                  "random|similarity-monotone|analogy-offsets|blobs|"
                  "outlier-groups|separable-tagging")
      ->required();
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", gen_seed, "PRNG seed");
  gen->add_option("--vocab", vocab, "vocabulary size");
  gen->add_option("--dim", dim, "vector dimension");
  gen->add_option("--pairs", pairs, "similarity pairs");
  gen->add_option("--relations", relations, "analogy relations");
  gen->add_option("--questions", questions, "analogy questions");
  gen->add_option("--k", k, "blob clusters");
  gen->add_option("--separation", separation, "blob separation factor");
  gen->add_option("--groups", groups, "outlier groups");
  gen->add_option("--group-size", group_size, "words per outlier group");
  gen->add_option("--sentences", sentences, "tagging sentences");

  // inspect-vectors
  auto* inspect = app.add_subcommand("inspect-vectors",
                                     "vocabulary/dim/norm summary and neighbors");
  std::string vec_path, vec_format = "text";
  std::vector<std::string> words;
  std::size_t neighbors = 5;
  inspect->add_option("--vectors", vec_path, "vector file")->required();
  inspect->add_option("--format", vec_format,
                      "text|text-header|text-noheader|binary");
  inspect->add_option("--words", words, "words to probe")->delimiter(',');
  inspect->add_option("-k,--neighbors", neighbors, "neighbors per word");

  CLI11_PARSE(app, argc, argv);

  if (eval->parsed()) {
    return run_eval(eval_config, eval_flags, eval_correlate);
  }

  if (correlate->parsed()) {
    return run_correlate(table_path, correlate_flags);
  }

  if (gen->parsed()) {
    char params[512];
    std::snprintf(params, sizeof(params),
                  "{\"seed\":%llu,\"vocab_size\":%zu,\"dim\":%zu,"
                  "\"pairs\":%zu,\"relations\":%zu,\"questions\":%zu,"
                  "\"k\":%zu,\"separation\":%.17g,\"groups\":%zu,"
                  "\"group_size\":%zu,\"sentences\":%zu}",
                  gen_seed, vocab, dim, pairs, relations, questions, k,
                  separation, groups, group_size, sentences);
    char* files = nullptr;
    we_status status =
        we_generate_fixture(structure.c_str(), params, gen_out.c_str(), &files);
    if (status != WE_OK) return fail(status);
    if (files) {
      std::printf("wrote (in %s):\n%s\n", gen_out.c_str(), files);
      we_string_free(files);
    }
    return 0;
  }

  if (inspect->parsed()) {
    we_store* store = nullptr;
    we_status status =
        we_store_open(vec_path.c_str(), vec_format.c_str(), "skip", &store);
    if (status != WE_OK) return fail(status);
    size_t size = we_store_size(store);
    size_t dims = we_store_dim(store);
    std::printf("vocabulary: %zu words, dimension: %zu\n", size, dims);

    std::vector<double> buffer(dims);
    for (const auto& word : words) {
      if (we_store_vector(store, word.c_str(), buffer.data()) != WE_OK) {
        std::printf("%s: out of vocabulary\n", word.c_str());
        continue;
      }
      double norm2 = 0.0;
      for (double v : buffer) norm2 += v * v;
      std::printf("%s: norm %.6f\n", word.c_str(), std::sqrt(norm2));
      char** neighbor_words = nullptr;
      double* scores = nullptr;
      size_t count = 0;
      if (we_store_nearest(store, word.c_str(), neighbors, &neighbor_words,
                           &scores, &count) == WE_OK) {
        for (size_t i = 0; i < count; ++i) {
          std::printf("  %-24s %.6f\n", neighbor_words[i], scores[i]);
        }
        we_store_neighbors_free(neighbor_words, scores, count);
      }
    }
    we_store_close(store);
    return 0;
  }

  return 2;
}
