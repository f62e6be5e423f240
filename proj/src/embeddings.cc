#include "kgqa/embeddings.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "http_util.h"
#include "json.hpp"
#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

EmbeddingStore::EmbeddingStore(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
  }
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kConfigError,
                "cannot open embedding file '" + path.string() + "'");
  }
  return parse(in);
}

namespace {

bool parse_float(std::string_view s, float& out) {
  // from_chars for floats is available in libstdc++ 11.
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingStore EmbeddingStore::parse(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::unique_ptr<EmbeddingStore> store;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    fields = text::split_whitespace(line);
    if (fields.empty()) continue;
    if (!store && fields.size() == 2) {
      // "N D" header.
      std::size_t n = 0, d = 0;
      auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), n);
      auto r2 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), d);
      if (r1.ec == std::errc() && r2.ec == std::errc() && d > 0) {
        store = std::make_unique<EmbeddingStore>(d);
        continue;
      }
    }
    if (fields.size() < 2) {
      throw LineError(ErrorCode::kMalformedData, line_no, "embedding line has no vector");
    }
    std::size_t dim = fields.size() - 1;
    if (!store) store = std::make_unique<EmbeddingStore>(dim);
    if (dim != store->dimension()) {
      throw LineError(ErrorCode::kMalformedData, line_no,
                      "expected " + std::to_string(store->dimension()) +
                          " components, found " + std::to_string(dim));
    }
    std::vector<float> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_float(fields[i + 1], vec[i])) {
        throw LineError(ErrorCode::kMalformedData, line_no,
                        "bad number '" + fields[i + 1] + "'");
      }
    }
    store->add(fields[0], std::move(vec));
  }
  if (!store) return EmbeddingStore();
  return std::move(*store);
}

void EmbeddingStore::add(std::string_view token, std::vector<float> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::kInvalidArgument,
                "vector for '" + std::string(token) + "' has dimension " +
                    std::to_string(vector.size()));
  }
  bool nonzero = false;
  for (float v : vector) nonzero = nonzero || v != 0.0f;
  // All-zero vectors carry no direction; those tokens fall back to characters.
  if (!nonzero) return;
  vectors_.try_emplace(text::to_lower(token), std::move(vector));
}

const std::vector<float>* EmbeddingStore::find(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> normalize_tokens(std::string_view label) {
  std::string cleaned;
  cleaned.reserve(label.size());
  for (std::size_t i = 0; i < label.size(); ++i) {
    char c = label[i];
    unsigned char u = static_cast<unsigned char>(c);
    if (text::is_ascii_alpha(c) || text::is_ascii_digit(c) || u >= 0x80) {
      cleaned.push_back(text::is_ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (c == '-') {
      bool left = i > 0 && !text::is_space(label[i - 1]) && label[i - 1] != '-' &&
                  label[i - 1] != '_';
      bool right = i + 1 < label.size() && !text::is_space(label[i + 1]) &&
                   label[i + 1] != '-' && label[i + 1] != '_';
      cleaned.push_back(left && right ? '-' : ' ');
    } else if (c == '\'' || c == '\xE2') {
      // Apostrophes join ("O'Brien" -> "obrien"); the curly form is UTF-8.
      if (c == '\xE2' && i + 2 < label.size() && label[i + 1] == '\x80' &&
          (label[i + 2] == '\x99' || label[i + 2] == '\x98')) {
        i += 2;
      } else if (c == '\xE2') {
        cleaned.push_back(c);
      }
    } else {
      cleaned.push_back(' ');
    }
  }
  std::vector<std::string> tokens = text::split_whitespace(cleaned);
  // Hyphens stranded at a token edge by stripped punctuation.
  for (auto& t : tokens) {
    while (!t.empty() && t.front() == '-') t.erase(t.begin());
    while (!t.empty() && t.back() == '-') t.pop_back();
  }
  std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
  return tokens;
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  // Final avalanche so nearby trigrams spread across buckets and signs.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

}  // namespace

std::vector<float> char_embed(std::string_view token, std::size_t dimension) {
  std::vector<double> acc(dimension, 0.0);
  std::string padded = "<" + std::string(token) + ">";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint64_t h = fnv1a(std::string_view(padded).substr(i, 3));
    std::size_t bucket = static_cast<std::size_t>(h % dimension);
    acc[bucket] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  if (norm == 0.0) {
    // Every trigram cancelled out; fall back to one bucket for the whole token.
    acc[fnv1a(token) % dimension] = 1.0;
    norm = 1.0;
  }
  norm = std::sqrt(norm);
  std::vector<float> out(dimension);
  for (std::size_t i = 0; i < dimension; ++i) out[i] = static_cast<float>(acc[i] / norm);
  return out;
}

std::vector<TokenEmbedding> embed_label(std::string_view label,
                                        const EmbeddingStore& store) {
  std::vector<std::string> tokens = normalize_tokens(label);
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyAfterNormalization,
                "label '" + std::string(label) + "' has no tokens");
  }
  std::vector<TokenEmbedding> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    TokenEmbedding e;
    if (const auto* vec = store.find(t)) {
      e.vector = *vec;
      e.source = EmbeddingSource::kWord;
    } else {
      e.vector = char_embed(t, store.dimension());
      e.source = EmbeddingSource::kChar;
    }
    e.token = std::move(t);
    out.push_back(std::move(e));
  }
  return out;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine of vectors with different sizes");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

double affinity(std::span<const TokenEmbedding> x, std::span<const TokenEmbedding> y) {
  if (x.empty() || y.empty()) {
    throw Error(ErrorCode::kEmptyAfterNormalization, "affinity of an empty label");
  }
  double sum = 0.0;
  for (const auto& xi : x) {
    for (const auto& yj : y) {
      if (xi.source != yj.source) continue;
      sum += cosine(xi.vector, yj.vector);
    }
  }
  return sum / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double affinity(std::string_view label_x, std::string_view label_y,
                const EmbeddingStore& store) {
  auto x = embed_label(label_x, store);
  auto y = embed_label(label_y, store);
  return affinity(x, y);
}

RemoteSentenceEmbedder::RemoteSentenceEmbedder(std::string url,
                                               std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {}

std::vector<float> RemoteSentenceEmbedder::embed(std::string_view text) const {
  auto url = internal::split_url(url_);
  auto client = internal::make_client(url.origin, timeout_);
  nlohmann::json body = {{"text", text}};
  auto res = client->Post(internal::join_path(url.path, "/embed"), body.dump(),
                          "application/json");
  if (!res || res->status != 200) {
    throw Error(ErrorCode::kProviderUnavailable,
                "sentence embedding provider unavailable: " +
                    (res ? "HTTP " + std::to_string(res->status)
                         : httplib::to_string(res.error())));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("vector").get<std::vector<float>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProviderUnavailable,
                std::string("sentence embedding provider sent a bad reply: ") + e.what());
  }
}

double coarse_affinity(std::string_view label_x, std::string_view label_y,
                       const SentenceEmbedder& provider) {
  auto x = provider.embed(label_x);
  auto y = provider.embed(label_y);
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::kProviderUnavailable,
                "sentence embedding provider returned inconsistent dimensions");
  }
  return cosine(x, y);
}

double WordAffinity::score(std::string_view x, std::string_view y) const {
  return affinity(x, y, *store_);
}

double CoarseAffinity::score(std::string_view x, std::string_view y) const {
  return coarse_affinity(x, y, *provider_);
}

}  // namespace kgqa
