#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "adaudit/common/service.hpp"
#include "adaudit/corpus/tweet.hpp"

namespace adaudit::clusterlab {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row i of `vectors` is the embedding of `ids[i]`.
template <typename Scalar>
struct EmbeddingMatrix {
  std::vector<std::string> ids;
  RowMatrix<Scalar> vectors;

  Eigen::Index rows() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

using EmbeddingMatrixd = EmbeddingMatrix<double>;
using EmbeddingMatrixf = EmbeddingMatrix<float>;

inline constexpr int kRawEmbeddingDim = 512;
inline constexpr int kReducedDim = 128;

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
};

/// Sentence-embedding service: POST /embed {"model": M, "text": T} -> {"vector": [...]}.
/// Cassette key: "embed:<model>:<text>".
class HttpEmbeddingClient final : public EmbeddingClient {
 public:
  HttpEmbeddingClient(JsonService service, std::string model = "distiluse-base-multilingual-cased-v2");
  std::vector<double> embed(std::string_view text) override;

 private:
  JsonService service_;
  std::string model_;
};

/// Rows follow input order. Throws dimension_mismatch if a vector's width
/// differs from `expected_dim`, precondition on non-finite components.
EmbeddingMatrixd embed_texts(const std::vector<corpus::TweetRecord>& records, EmbeddingClient& client,
                             int expected_dim = kRawEmbeddingDim);

}  // namespace adaudit::clusterlab
