#include "adaudit/clusterlab/embedding.hpp"

#include <cmath>

#include <fmt/format.h>

#include "adaudit/clusterlab/distance.hpp"

namespace adaudit::clusterlab {

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::cosine: return "cosine";
  }
  return "euclidean";
}

std::optional<Metric> parse_metric(std::string_view text) {
  if (text == "euclidean") return Metric::euclidean;
  if (text == "manhattan") return Metric::manhattan;
  if (text == "cosine") return Metric::cosine;
  return std::nullopt;
}

HttpEmbeddingClient::HttpEmbeddingClient(JsonService service, std::string model)
    : service_(std::move(service)), model_(std::move(model)) {}

std::vector<double> HttpEmbeddingClient::embed(std::string_view text) {
  HttpCall call;
  call.method = "POST";
  call.path = "/embed";
  call.body = nlohmann::json{{"model", model_}, {"text", std::string(text)}};
  const auto reply = service_.call("embed:" + model_ + ":" + std::string(text), call);
  if (reply.status != 200) fail(Errc::service_unavailable, "embedding service returned HTTP " + std::to_string(reply.status));
  if (!reply.body.is_object() || !reply.body.contains("vector") || !reply.body["vector"].is_array())
    fail(Errc::service_unavailable, "embedding reply lacks a vector");
  return reply.body["vector"].get<std::vector<double>>();
}

EmbeddingMatrixd embed_texts(const std::vector<corpus::TweetRecord>& records, EmbeddingClient& client, int expected_dim) {
  EmbeddingMatrixd m;
  m.vectors.resize(static_cast<Eigen::Index>(records.size()), expected_dim);
  m.ids.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto v = client.embed(records[i].text);
    if (static_cast<int>(v.size()) != expected_dim)
      fail(Errc::dimension_mismatch,
           fmt::format("embedding for {} has {} components, expected {}", records[i].tweet_id, v.size(), expected_dim));
    for (int j = 0; j < expected_dim; ++j) {
      require(std::isfinite(v[static_cast<std::size_t>(j)]), "non-finite embedding component for " + records[i].tweet_id);
      m.vectors(static_cast<Eigen::Index>(i), j) = v[static_cast<std::size_t>(j)];
    }
    m.ids.push_back(records[i].tweet_id);
  }
  return m;
}

}  // namespace adaudit::clusterlab
