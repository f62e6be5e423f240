#pragma once

#include <chrono>
#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgqa {

enum class EmbeddingSource { kWord, kChar };

struct TokenEmbedding {
  std::string token;
  std::vector<float> vector;
  EmbeddingSource source = EmbeddingSource::kWord;
};

// Word vectors keyed by token. Immutable once loaded; safe to share across
// threads.
class EmbeddingStore {
 public:
  static constexpr std::size_t kDefaultDimension = 300;

  explicit EmbeddingStore(std::size_t dimension = kDefaultDimension);

  // Text format: "token v1 ... vD" per line, optional "N D" header line.
  static EmbeddingStore load(const std::filesystem::path& path);
  static EmbeddingStore parse(std::istream& in);

  // Lookup is by lowercased token; the first spelling loaded wins.
  void add(std::string_view token, std::vector<float> vector);
  const std::vector<float>* find(std::string_view token) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Lowercases, strips punctuation (keeping intra-word hyphens) and splits on
// whitespace and underscores.
std::vector<std::string> normalize_tokens(std::string_view label);

// Hashed character-trigram embedding for tokens missing from the vocabulary.
// Deterministic and L2-normalised.
std::vector<float> char_embed(std::string_view token, std::size_t dimension);

std::vector<TokenEmbedding> embed_label(std::string_view label,
                                        const EmbeddingStore& store);

double cosine(std::span<const float> a, std::span<const float> b);

// Mean pairwise cosine over the two labels' token embeddings. Pairs mixing a
// word vector with a character vector contribute zero.
double affinity(std::string_view label_x, std::string_view label_y,
                const EmbeddingStore& store);

double affinity(std::span<const TokenEmbedding> x,
                std::span<const TokenEmbedding> y);

// Whole-string embedding service (one vector per label).
class SentenceEmbedder {
 public:
  virtual ~SentenceEmbedder() = default;
  virtual std::vector<float> embed(std::string_view text) const = 0;
};

// POST <url>/embed {"text": ...} -> {"vector": [...]}.
class RemoteSentenceEmbedder : public SentenceEmbedder {
 public:
  explicit RemoteSentenceEmbedder(
      std::string url,
      std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));
  std::vector<float> embed(std::string_view text) const override;

 private:
  std::string url_;
  std::chrono::milliseconds timeout_;
};

double coarse_affinity(std::string_view label_x, std::string_view label_y,
                       const SentenceEmbedder& provider);

// Scoring strategy used by the linker and the answer filter.
class AffinityScorer {
 public:
  virtual ~AffinityScorer() = default;
  virtual double score(std::string_view x, std::string_view y) const = 0;
};

class WordAffinity : public AffinityScorer {
 public:
  explicit WordAffinity(std::shared_ptr<const EmbeddingStore> store)
      : store_(std::move(store)) {}
  double score(std::string_view x, std::string_view y) const override;
  const EmbeddingStore& store() const { return *store_; }

 private:
  std::shared_ptr<const EmbeddingStore> store_;
};

class CoarseAffinity : public AffinityScorer {
 public:
  explicit CoarseAffinity(std::shared_ptr<const SentenceEmbedder> provider)
      : provider_(std::move(provider)) {}
  double score(std::string_view x, std::string_view y) const override;

 private:
  std::shared_ptr<const SentenceEmbedder> provider_;
};

}  // namespace kgqa
