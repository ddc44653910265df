#include "wordeval/vecstore.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace wordeval {

namespace {

std::string ascii_lower(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

double parse_real(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                      ": bad number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::Parse,
                "line " + std::to_string(line_no) + ": non-finite value");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

float load_le_float(const unsigned char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       static_cast<std::uint32_t>(p[1]) << 8 |
                       static_cast<std::uint32_t>(p[2]) << 16 |
                       static_cast<std::uint32_t>(p[3]) << 24;
  return std::bit_cast<float>(bits);
}

void store_le_float(float value, unsigned char* p) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
  p[0] = static_cast<unsigned char>(bits & 0xff);
  p[1] = static_cast<unsigned char>((bits >> 8) & 0xff);
  p[2] = static_cast<unsigned char>((bits >> 16) & 0xff);
  p[3] = static_cast<unsigned char>((bits >> 24) & 0xff);
}

}  // namespace

VecStore::VecStore(std::vector<std::string> vocab, Eigen::MatrixXd matrix,
                   OovPolicy policy)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), policy_(policy) {
  if (vocab_.empty()) {
    throw Error(ErrorKind::Invalid, "empty vector store");
  }
  if (static_cast<Eigen::Index>(vocab_.size()) != matrix_.rows()) {
    throw Error(ErrorKind::Invalid, "vocab/matrix row count mismatch");
  }
  if (matrix_.cols() <= 0) {
    throw Error(ErrorKind::Invalid, "vector dimension must be positive");
  }
  if (!matrix_.allFinite()) {
    throw Error(ErrorKind::Invalid, "non-finite value in vector matrix");
  }
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], i).second) {
      throw Error(ErrorKind::Parse, "duplicate word '" + vocab_[i] + "'");
    }
  }
  row_norms_.resize(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    row_norms_[i] = matrix_.row(static_cast<Eigen::Index>(i)).norm();
  }
  unk_ = matrix_.colwise().mean().transpose();
}

VecStore VecStore::load_text(std::istream& in, TextHeader header,
                             OovPolicy policy) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> vocab;
  std::vector<double> values;
  Eigen::Index dim = -1;
  std::size_t declared_vocab = 0;
  bool expect_header = false;
  bool first_content_line = true;

  auto consume_data_line = [&](std::string_view text) {
    auto tokens = split_ws(text);
    if (tokens.empty()) return;
    if (dim < 0) {
      dim = static_cast<Eigen::Index>(tokens.size()) - 1;
      if (dim <= 0) {
        throw Error(ErrorKind::Parse,
                    "line " + std::to_string(line_no) + ": no vector values");
      }
    }
    if (static_cast<Eigen::Index>(tokens.size()) != dim + 1) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": dimension mismatch (expected " +
                                        std::to_string(dim) + " values)");
    }
    vocab.emplace_back(tokens[0]);
    for (Eigen::Index d = 0; d < dim; ++d) {
      values.push_back(parse_real(tokens[static_cast<std::size_t>(d) + 1], line_no));
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first_content_line) {
      first_content_line = false;
      if (header != TextHeader::Absent) {
        auto tokens = split_ws(line);
        bool looks_like_header = tokens.size() == 2;
        if (looks_like_header) {
          for (auto t : tokens) {
            looks_like_header &=
                !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
                  return c >= '0' && c <= '9';
                });
          }
        }
        if (looks_like_header) {
          declared_vocab = std::stoull(std::string(tokens[0]));
          dim = static_cast<Eigen::Index>(std::stoull(std::string(tokens[1])));
          if (dim <= 0) throw Error(ErrorKind::Parse, "header declares dim 0");
          expect_header = true;
          continue;
        }
        if (header == TextHeader::Present) {
          throw Error(ErrorKind::Parse, "expected 'vocabsize dim' header line");
        }
      }
    }
    consume_data_line(line);
  }

  if (vocab.empty()) {
    throw Error(ErrorKind::Parse, "empty embedding file");
  }
  if (expect_header && declared_vocab != vocab.size()) {
    throw Error(ErrorKind::Parse,
                "header declares " + std::to_string(declared_vocab) +
                    " words but file has " + std::to_string(vocab.size()));
  }

  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(vocab.size()), dim);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      matrix(static_cast<Eigen::Index>(i), d) =
          values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)];
    }
  }
  return VecStore(std::move(vocab), std::move(matrix), policy);
}

VecStore VecStore::load_binary(std::istream& in, OovPolicy policy) {
  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrorKind::Parse, "empty embedding file");
  }
  auto tokens = split_ws(header);
  if (tokens.size() != 2) {
    throw Error(ErrorKind::Parse, "expected 'vocabsize dim' header line");
  }
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  try {
    vocab_size = std::stoull(std::string(tokens[0]));
    dim = std::stoull(std::string(tokens[1]));
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "malformed binary header");
  }
  if (vocab_size == 0 || dim == 0) {
    throw Error(ErrorKind::Parse, "binary header declares empty store");
  }

  std::vector<std::string> vocab;
  vocab.reserve(vocab_size);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(vocab_size),
                         static_cast<Eigen::Index>(dim));
  std::vector<unsigned char> buf(dim * 4);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    std::string word;
    int c;
    // Leading newlines left over from the previous vector are tolerated.
    while ((c = in.get()) == '\n') {
    }
    while (c != ' ' && c != EOF) {
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF) {
      throw Error(ErrorKind::Parse, "truncated stream in word " +
                                        std::to_string(i + 1) + " of " +
                                        std::to_string(vocab_size));
    }
    if (word.empty()) {
      throw Error(ErrorKind::Parse, "empty word in binary stream");
    }
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
      throw Error(ErrorKind::Parse, "truncated stream in vector for '" + word + "'");
    }
    vocab.push_back(std::move(word));
    for (std::size_t d = 0; d < dim; ++d) {
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
          static_cast<double>(load_le_float(buf.data() + d * 4));
    }
  }
  return VecStore(std::move(vocab), std::move(matrix), policy);
}

void VecStore::save_binary(std::ostream& out) const {
  out << size() << ' ' << dim() << '\n';
  std::vector<unsigned char> buf(static_cast<std::size_t>(dim()) * 4);
  for (std::size_t i = 0; i < size(); ++i) {
    const std::string& w = vocab_[i];
    if (w.find(' ') != std::string::npos || w.find('\n') != std::string::npos) {
      throw Error(ErrorKind::Invalid,
                  "word '" + w + "' contains a separator byte");
    }
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
    out.put(' ');
    for (Eigen::Index d = 0; d < dim(); ++d) {
      store_le_float(static_cast<float>(matrix_(static_cast<Eigen::Index>(i), d)),
                     buf.data() + static_cast<std::size_t>(d) * 4);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    out.put('\n');
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on binary embedding sink");
}

void VecStore::save_text(std::ostream& out, bool with_header) const {
  if (with_header) out << size() << ' ' << dim() << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out << vocab_[i];
    for (Eigen::Index d = 0; d < dim(); ++d) {
      out << ' ' << format_double(matrix_(static_cast<Eigen::Index>(i), d));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on text embedding sink");
}

std::optional<std::size_t> VecStore::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  std::string lower = ascii_lower(word);
  if (lower != word) {
    it = index_.find(lower);
    if (it != index_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<Eigen::VectorXd> VecStore::lookup(std::string_view word) const {
  if (auto idx = find(word)) {
    return Eigen::VectorXd(row(*idx).transpose());
  }
  if (policy_ == OovPolicy::SharedUnk) return unk_;
  return std::nullopt;
}

Eigen::VectorXd VecStore::vector_or_unk(std::string_view word) const {
  if (auto idx = find(word)) {
    return row(*idx).transpose();
  }
  return unk_;
}

std::vector<Neighbor> VecStore::nearest(
    const Eigen::VectorXd& query, std::size_t k,
    const std::vector<std::string>& exclude) const {
  if (query.size() != dim()) {
    throw Error(ErrorKind::Invalid, "query dimension mismatch");
  }
  double qnorm = query.norm();
  if (qnorm == 0.0) {
    throw Error(ErrorKind::Invalid, "zero-norm query vector");
  }
  if (k == 0) return {};

  std::unordered_set<std::size_t> excluded;
  for (const auto& w : exclude) {
    if (auto idx = find(w)) excluded.insert(*idx);
  }

  Eigen::VectorXd dots = matrix_ * query;
  std::vector<std::size_t> order;
  order.reserve(size());
  std::vector<double> scores(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (!usable(i) || excluded.count(i)) continue;
    scores[i] = dots(static_cast<Eigen::Index>(i)) / (row_norms_[i] * qnorm);
    order.push_back(i);
  }
  std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  std::vector<Neighbor> result;
  result.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    result.push_back({vocab_[order[i]], scores[order[i]]});
  }
  return result;
}

VecStore VecStore::with_policy(OovPolicy policy) const {
  VecStore copy = *this;
  copy.policy_ = policy;
  return copy;
}

double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::Invalid, "cosine of vectors with different dims");
  }
  double nu = u.norm();
  double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw Error(ErrorKind::Invalid, "cosine of zero-norm vector");
  }
  return u.dot(v) / (nu * nv);
}

VecStore unit_normalize(const VecStore& store) {
  if (store.unit_normalized()) return store;
  VecStore copy = store;
  for (std::size_t i = 0; i < copy.size(); ++i) {
    if (copy.row_norms_[i] > 0.0) {
      copy.matrix_.row(static_cast<Eigen::Index>(i)) /= copy.row_norms_[i];
      copy.row_norms_[i] = 1.0;
    }
  }
  copy.unk_ = copy.matrix_.colwise().mean().transpose();
  copy.unit_normalized_ = true;
  return copy;
}

}  // namespace wordeval
