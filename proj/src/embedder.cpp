#include "uoterrant/embedder.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>

#include <httplib.h>
#include <json.hpp>

#include "uoterrant/errors.hpp"
#include "uoterrant/textspan.hpp"

namespace uoterrant {

namespace {

constexpr std::string_view kStoreFormat = "editvec-emb/v1";

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void require_finite(const EmbeddingVector& v, const std::string& context) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ServiceError("non-finite embedding value for " + context);
  }
}

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

EmbeddingVector token_vector(std::string_view token, std::size_t dim) {
  std::uint64_t state = fnv1a64(token);
  EmbeddingVector v(dim);
  double sq = 0.0;
  for (auto& x : v) {
    double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x = 2.0 * unit - 1.0;
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  for (auto& x : v) x /= norm;
  return v;
}

TestEmbedder::TestEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error("test embedder dimension must be positive");
}

EmbeddingVector TestEmbedder::embed(std::string_view text) const {
  EmbeddingVector mean(dim_, 0.0);
  auto tokens = tokenize(text);
  if (tokens.empty()) return mean;
  for (const auto& tok : tokens) {
    auto v = token_vector(tok, dim_);
    for (std::size_t k = 0; k < dim_; ++k) mean[k] += v[k];
  }
  const double n = static_cast<double>(tokens.size());
  for (auto& x : mean) x /= n;
  return mean;
}

EmbeddingStore::EmbeddingStore(std::size_t dim, std::string encoder, std::string pooling)
    : dim_(dim), encoder_(std::move(encoder)), pooling_(std::move(pooling)) {
  if (dim == 0) throw Error("store dimension must be positive");
}

EmbeddingVector EmbeddingStore::embed(std::string_view text) const {
  auto it = map_.find(std::string(text));
  if (it == map_.end()) throw MissingEmbedding(std::string(text));
  return it->second;
}

bool EmbeddingStore::contains(std::string_view text) const { return map_.count(std::string(text)) > 0; }

bool EmbeddingStore::insert(std::string text, EmbeddingVector v) {
  if (v.size() != dim_) {
    throw DimMismatch("vector of length " + std::to_string(v.size()) + " in a store of dim " + std::to_string(dim_));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw Error("non-finite value in embedding for \"" + text + "\"");
  }
  auto it = map_.find(text);
  if (it != map_.end()) {
    it->second = std::move(v);
    return true;
  }
  order_.push_back(text);
  map_.emplace(std::move(text), std::move(v));
  return false;
}

StoreLoadResult load_store(std::istream& in) {
  using nlohmann::json;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty embedding file", 1);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad header: ") + e.what(), 1);
  }
  if (!header.is_object() || header.value("format", "") != kStoreFormat) {
    throw FormatError("header must declare format " + std::string(kStoreFormat), 1);
  }
  if (!header.contains("dim") || !header["dim"].is_number_unsigned() || header["dim"].get<std::size_t>() == 0) {
    throw FormatError("header needs a positive integer dim", 1);
  }
  StoreLoadResult out{EmbeddingStore(header["dim"].get<std::size_t>(), header.value("encoder", "unknown"),
                                     header.value("pooling", "mean")),
                      {}};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(e.what(), line_no);
    }
    if (!rec.is_object() || !rec.contains("text") || !rec["text"].is_string() || !rec.contains("v") ||
        !rec["v"].is_array()) {
      throw FormatError("record needs a string 'text' and an array 'v'", line_no);
    }
    EmbeddingVector v;
    v.reserve(rec["v"].size());
    for (const auto& x : rec["v"]) {
      if (!x.is_number()) throw FormatError("non-numeric vector entry", line_no);
      v.push_back(x.get<double>());
    }
    if (v.size() != out.store.dim()) {
      throw DimMismatch("line " + std::to_string(line_no) + ": expected " + std::to_string(out.store.dim()) +
                        " values, got " + std::to_string(v.size()));
    }
    auto text = rec["text"].get<std::string>();
    if (out.store.insert(text, std::move(v))) {
      out.warnings.push_back("line " + std::to_string(line_no) + ": duplicate text \"" + text + "\", keeping the last");
    }
  }
  return out;
}

StoreLoadResult load_store(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load_store(in);
}

void save_store(const EmbeddingStore& store, std::ostream& out) {
  nlohmann::json header = {
      {"format", kStoreFormat}, {"dim", store.dim()}, {"encoder", store.name()}, {"pooling", store.pooling()}};
  out << header.dump() << '\n';
  for (const auto& key : store.keys()) {
    out << "{\"text\":" << nlohmann::json(key).dump() << ",\"v\":[";
    const auto v = store.embed(key);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out << ',';
      out << format_double(v[k]);
    }
    out << "]}\n";
  }
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  save_store(store, out);
}

RemoteEmbedder::RemoteEmbedder(std::string url) : RemoteEmbedder(std::move(url), Options{}) {}

RemoteEmbedder::RemoteEmbedder(std::string url, Options options) : url_(std::move(url)), options_(options) {
  auto scheme = url_.find("://");
  if (scheme == std::string::npos) throw Error("remote url needs a scheme: " + url_);
  auto slash = url_.find('/', scheme + 3);
  host_ = url_.substr(0, slash);
  base_path_ = slash == std::string::npos ? "" : url_.substr(slash);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

std::vector<EmbeddingVector> RemoteEmbedder::request(const std::vector<std::string>& texts) const {
  using nlohmann::json;
  httplib::Client client(host_);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_connection_timeout(10, 0);
  json body = {{"texts", texts}};
  auto res = client.Post(base_path_ + "/embed", body.dump(), "application/json");
  if (!res) throw ServiceError("POST " + url_ + "/embed failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ServiceError("POST " + url_ + "/embed returned status " + std::to_string(res->status));
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ServiceError(std::string("malformed /embed response: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("dim") || !reply["dim"].is_number_unsigned() ||
      !reply.contains("vectors") || !reply["vectors"].is_array()) {
    throw ServiceError("/embed response must carry 'dim' and 'vectors'");
  }
  const auto dim = reply["dim"].get<std::size_t>();
  if (reply["vectors"].size() != texts.size()) {
    throw ServiceError("/embed returned " + std::to_string(reply["vectors"].size()) + " vectors for " +
                       std::to_string(texts.size()) + " texts");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& row = reply["vectors"][i];
    if (!row.is_array() || row.size() != dim) throw ServiceError("/embed vector length does not match dim");
    EmbeddingVector v;
    v.reserve(dim);
    for (const auto& x : row) {
      if (!x.is_number()) throw ServiceError("/embed vector holds a non-number");
      v.push_back(x.get<double>());
    }
    require_finite(v, "\"" + texts[i] + "\"");
    out.push_back(std::move(v));
  }
  return out;
}

void RemoteEmbedder::remember(const std::vector<std::string>& texts, std::vector<EmbeddingVector> vectors) const {
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (dim_ == 0) dim_ = vectors[i].size();
    if (vectors[i].size() != dim_) {
      throw ServiceError("/embed dim changed from " + std::to_string(dim_) + " to " + std::to_string(vectors[i].size()));
    }
    cache_[texts[i]] = std::move(vectors[i]);
  }
}

std::size_t RemoteEmbedder::dim() const {
  {
    std::lock_guard lock(mutex_);
    if (dim_ != 0) return dim_;
  }
  remember({""}, request({""}));
  std::lock_guard lock(mutex_);
  return dim_;
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(std::string(text));
    if (it != cache_.end()) return it->second;
  }
  std::vector<std::string> one{std::string(text)};
  auto vectors = request(one);
  EmbeddingVector v = vectors.front();
  remember(one, std::move(vectors));
  return v;
}

void RemoteEmbedder::prefetch(const std::vector<std::string>& texts) const {
  std::vector<std::string> todo;
  {
    std::lock_guard lock(mutex_);
    for (const auto& t : texts) {
      if (!cache_.count(t)) todo.push_back(t);
    }
  }
  std::vector<std::vector<std::string>> batches;
  for (std::size_t i = 0; i < todo.size(); i += options_.batch_size) {
    auto last = std::min(todo.size(), i + options_.batch_size);
    batches.emplace_back(todo.begin() + static_cast<std::ptrdiff_t>(i), todo.begin() + static_cast<std::ptrdiff_t>(last));
  }
  for (std::size_t i = 0; i < batches.size(); i += options_.max_in_flight) {
    std::vector<std::future<std::vector<EmbeddingVector>>> inflight;
    auto last = std::min(batches.size(), i + options_.max_in_flight);
    for (std::size_t b = i; b < last; ++b) {
      inflight.push_back(std::async(std::launch::async, [this, &batches, b] { return request(batches[b]); }));
    }
    for (std::size_t b = i; b < last; ++b) remember(batches[b], inflight[b - i].get());
  }
}

std::shared_ptr<const EmbeddingProvider> make_provider(const std::string& backend) {
  if (backend == "test") return std::make_shared<TestEmbedder>();
  if (backend.starts_with("test:")) {
    std::size_t dim = 0;
    const auto digits = std::string_view(backend).substr(5);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) throw Error("bad test embedder dim: " + backend);
    return std::make_shared<TestEmbedder>(dim);
  }
  if (backend.starts_with("store:")) {
    auto loaded = load_store(std::filesystem::path(backend.substr(6)));
    return std::make_shared<EmbeddingStore>(std::move(loaded.store));
  }
  if (backend.starts_with("remote:")) return std::make_shared<RemoteEmbedder>(backend.substr(7));
  throw Error("unknown embedder backend '" + backend + "'");
}

}  // namespace uoterrant
