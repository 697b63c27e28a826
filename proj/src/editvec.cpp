#include "uoterrant/editvec.hpp"

#include <algorithm>
#include <cmath>

#include "uoterrant/errors.hpp"

namespace uoterrant {

namespace {

EmbeddingVector difference(const EmbeddingVector& a, const EmbeddingVector& b) {
  EmbeddingVector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

// Embeds an intermediate sentence, naming it if the provider fails.
EmbeddingVector embed_named(const EmbeddingProvider& provider, const std::string& text) {
  try {
    return provider.embed(text);
  } catch (const MissingEmbedding&) {
    throw;
  } catch (const ServiceError& e) {
    throw ServiceError(std::string(e.what()) + " (while embedding \"" + text + "\")");
  }
}

}  // namespace

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double l2_norm(const EmbeddingVector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

std::vector<std::string> intermediate_sentences(const TokenSeq& src, const EditSet& edits, VectorizeMode mode) {
  std::vector<std::string> out;
  if (edits.empty()) return out;
  if (mode == VectorizeMode::Remove) {
    out.push_back(detokenize(apply_edits(src, edits)));
    for (std::size_t i = 0; i < edits.size(); ++i) out.push_back(detokenize(apply_edits(src, edits.without(i))));
  } else {
    out.push_back(detokenize(src));
    for (const auto& e : edits) out.push_back(detokenize(apply_edits(src, EditSet({e}))));
  }
  return out;
}

std::vector<EmbeddingVector> edit_vectors(const TokenSeq& src, const EditSet& edits,
                                          const EmbeddingProvider& provider, VectorizeMode mode) {
  edits.check_against(src.size());
  std::vector<EmbeddingVector> out;
  if (edits.empty()) return out;
  const auto sentences = intermediate_sentences(src, edits, mode);
  // sentences[0] is the shared anchor: S_E for Remove, S for Add.
  const auto anchor = embed_named(provider, sentences[0]);
  out.reserve(edits.size());
  for (std::size_t i = 0; i < edits.size(); ++i) {
    auto other = embed_named(provider, sentences[i + 1]);
    if (other.size() != anchor.size()) throw DimMismatch("embedding dimension changed between sentences");
    out.push_back(mode == VectorizeMode::Remove ? difference(anchor, other) : difference(other, anchor));
  }
  return out;
}

std::vector<double> masses(const std::vector<EmbeddingVector>& vectors, MassMode mode) {
  std::vector<double> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(mode == MassMode::Uniform ? 1.0 : std::max(l2_norm(v), kMassFloor));
  return out;
}

CostMatrix cost_matrix(const std::vector<EmbeddingVector>& hyp, const std::vector<EmbeddingVector>& ref, CostMode mode) {
  CostMatrix c(hyp.size(), ref.size());
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const auto& v = hyp[i];
      const auto& u = ref[j];
      if (v.size() != u.size()) {
        throw DimMismatch("edit vectors of dimension " + std::to_string(v.size()) + " and " + std::to_string(u.size()));
      }
      if (mode == CostMode::Euclidean) {
        double sq = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) sq += (v[k] - u[k]) * (v[k] - u[k]);
        c(i, j) = std::sqrt(sq);
      } else {
        const double nv = l2_norm(v), nu = l2_norm(u);
        double cosine = 0.0;
        if (nv >= kMassFloor && nu >= kMassFloor) {
          double dot = 0.0;
          for (std::size_t k = 0; k < v.size(); ++k) dot += v[k] * u[k];
          cosine = std::clamp(dot / (nv * nu), -1.0, 1.0);
        }
        c(i, j) = 1.0 - cosine;
      }
    }
  }
  return c;
}

EditVectorSet vectorize(const TokenSeq& src, const EditSet& edits, const EmbeddingProvider& provider,
                        VectorizeMode vmode, MassMode mmode) {
  EditVectorSet out;
  out.edits = edits;
  out.vectors = edit_vectors(src, edits, provider, vmode);
  out.masses = masses(out.vectors, mmode);
  return out;
}

}  // namespace uoterrant
