#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uoterrant {

using EmbeddingVector = std::vector<double>;

/// Sentence encoder. Implementations are read-only after construction and
/// safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual EmbeddingVector embed(std::string_view text) const = 0;

  // Hint that these sentences will be requested soon. No-op by default.
  virtual void prefetch(const std::vector<std::string>& texts) const { (void)texts; }
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Unit-norm pseudo-random vector derived only from the token's bytes.
EmbeddingVector token_vector(std::string_view token, std::size_t dim);

/// Deterministic stand-in for a neural encoder: the mean of per-token hash
/// vectors over the whitespace tokens of the sentence.
class TestEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDim = 32;

  explicit TestEmbedder(std::size_t dim = kDefaultDim);
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "test-hash/" + std::to_string(dim_); }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  std::size_t dim_;
};

/// Exact-text lookup table of precomputed sentence embeddings.
class EmbeddingStore final : public EmbeddingProvider {
 public:
  EmbeddingStore(std::size_t dim, std::string encoder, std::string pooling = "mean");

  std::size_t dim() const override { return dim_; }
  std::string name() const override { return encoder_; }
  const std::string& pooling() const { return pooling_; }
  EmbeddingVector embed(std::string_view text) const override;

  bool contains(std::string_view text) const;
  std::size_t size() const { return order_.size(); }
  /// Returns true if the text was already present (the new vector wins).
  bool insert(std::string text, EmbeddingVector v);
  const std::vector<std::string>& keys() const { return order_; }

 private:
  std::size_t dim_;
  std::string encoder_;
  std::string pooling_;
  std::unordered_map<std::string, EmbeddingVector> map_;
  std::vector<std::string> order_;
};

struct StoreLoadResult {
  EmbeddingStore store;
  std::vector<std::string> warnings;
};

StoreLoadResult load_store(const std::filesystem::path& path);
StoreLoadResult load_store(std::istream& in);
void save_store(const EmbeddingStore& store, const std::filesystem::path& path);
void save_store(const EmbeddingStore& store, std::ostream& out);

/// Client for an HTTP service exposing POST /embed. Vectors are cached in
/// memory; prefetch() sends batched requests with bounded concurrency.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  struct Options {
    std::size_t batch_size = 64;
    std::size_t max_in_flight = 4;
    int timeout_seconds = 120;
  };

  explicit RemoteEmbedder(std::string url);
  RemoteEmbedder(std::string url, Options options);

  std::size_t dim() const override;
  std::string name() const override { return "remote:" + url_; }
  EmbeddingVector embed(std::string_view text) const override;
  void prefetch(const std::vector<std::string>& texts) const override;

 private:
  std::vector<EmbeddingVector> request(const std::vector<std::string>& texts) const;
  void remember(const std::vector<std::string>& texts, std::vector<EmbeddingVector> vectors) const;

  std::string url_;
  std::string host_;
  std::string base_path_;
  Options options_;
  mutable std::mutex mutex_;
  mutable std::size_t dim_ = 0;
  mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

/// Builds a provider from a backend string: "test", "test:<dim>",
/// "store:<path>" or "remote:<url>".
std::shared_ptr<const EmbeddingProvider> make_provider(const std::string& backend);

}  // namespace uoterrant
