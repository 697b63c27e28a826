#pragma once

#include <cstddef>
#include <vector>

#include "uoterrant/embedder.hpp"
#include "uoterrant/textspan.hpp"

namespace uoterrant {

enum class VectorizeMode { Remove, Add };
enum class MassMode { L2Norm, Uniform };
enum class CostMode { Euclidean, CosineDistance };

inline constexpr double kMassFloor = 1e-12;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using CostMatrix = Matrix;

struct EditVectorSet {
  EditSet edits;
  std::vector<EmbeddingVector> vectors;
  std::vector<double> masses;
};

double l2_norm(const EmbeddingVector& v);

/// One vector per edit. Remove: Enc(S_E) - Enc(S_{E minus e}); Add: Enc(S_{e}) - Enc(S).
std::vector<EmbeddingVector> edit_vectors(const TokenSeq& src, const EditSet& edits,
                                          const EmbeddingProvider& provider, VectorizeMode mode);

std::vector<double> masses(const std::vector<EmbeddingVector>& vectors, MassMode mode);

/// Rows index hypothesis vectors, columns reference vectors.
CostMatrix cost_matrix(const std::vector<EmbeddingVector>& hyp, const std::vector<EmbeddingVector>& ref, CostMode mode);

EditVectorSet vectorize(const TokenSeq& src, const EditSet& edits, const EmbeddingProvider& provider,
                        VectorizeMode vmode, MassMode mmode);

/// Every sentence that edit_vectors() embeds for this edit set, in request order.
std::vector<std::string> intermediate_sentences(const TokenSeq& src, const EditSet& edits, VectorizeMode mode);

}  // namespace uoterrant
