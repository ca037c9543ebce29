#include "adaudit/explicitness/clients.hpp"

#include <httplib.h>

namespace adaudit::explicitness {
namespace {

std::string key_query(const JsonService& service) {
  if (!service.endpoint() || service.endpoint()->api_key.empty()) return {};
  return "?key=" + httplib::detail::encode_query_param(service.endpoint()->api_key);
}

}  // namespace

PerspectiveClient::PerspectiveClient(JsonService service, std::string attribute)
    : service_(std::move(service)), attribute_(std::move(attribute)) {}

double PerspectiveClient::score(std::string_view text) {
  HttpCall call;
  call.method = "POST";
  call.path = "/v1alpha1/comments:analyze" + key_query(service_);
  call.body = nlohmann::json{{"comment", {{"text", std::string(text)}}},
                             {"languages", {"en"}},
                             {"requestedAttributes", {{attribute_, nlohmann::json::object()}}}};
  const auto reply = service_.call("explicit:" + attribute_ + ":" + std::string(text), call);
  if (reply.status != 200) fail(Errc::service_unavailable, "analyzer returned HTTP " + std::to_string(reply.status));
  const auto ptr = nlohmann::json::json_pointer("/attributeScores/" + attribute_ + "/summaryScore/value");
  if (!reply.body.is_object() || !reply.body.contains(ptr)) fail(Errc::service_unavailable, "analyzer reply lacks " + attribute_);
  return reply.body.at(ptr).get<double>();
}

GoogleTranslateClient::GoogleTranslateClient(JsonService service) : service_(std::move(service)) {}

std::string GoogleTranslateClient::translate(std::string_view text, std::string_view source_lang) {
  HttpCall call;
  call.method = "POST";
  call.path = "/language/translate/v2" + key_query(service_);
  nlohmann::json body{{"q", std::string(text)}, {"target", "en"}, {"format", "text"}};
  // "und"/"qme"-style platform codes are not translator languages; let the service detect.
  if (source_lang.size() == 2) body["source"] = std::string(source_lang);
  call.body = body;
  const auto reply =
      service_.call("translate:" + std::string(source_lang) + ":en:" + std::string(text), call);
  if (reply.status != 200) fail(Errc::service_unavailable, "translator returned HTTP " + std::to_string(reply.status));
  const auto ptr = nlohmann::json::json_pointer("/data/translations/0/translatedText");
  if (!reply.body.is_object() || !reply.body.contains(ptr)) fail(Errc::service_unavailable, "translator reply malformed");
  return reply.body.at(ptr).get<std::string>();
}

}  // namespace adaudit::explicitness
