// Copyright 2026 The tonecc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "tonecc/base64.hpp"
#include "tonecc/error.hpp"
#include "tonecc/io.hpp"
#include "tonecc/serialize.hpp"
#include "tonecc/style.hpp"

namespace tonecc {

/// Status code plus JSON body; the HTTP layer only copies these out.
struct ServiceResponse {
  int status = 200;
  Json body;
};

/// Stateless JSON API over a read-only StyleSet:
///   GET  /healthz, GET /styles,
///   POST /enhance     {image, style}
///   POST /interpolate {image, style_a, style_b, t}
///   POST /chain       {image, styles: [...]}
/// Images travel as base64 PNG. Handlers never mutate shared state, so
/// concurrent requests are safe.
class StyleService {
 public:
  explicit StyleService(StyleSet styles) : styles_(std::move(styles)) {}

  ServiceResponse healthz() const { return {200, {{"status", "ok"}}}; }

  ServiceResponse list_styles() const { return {200, {{"styles", styles_.names()}}}; }

  ServiceResponse enhance(const std::string& body) const {
    return guarded([&] {
      const auto req = parse(body);
      const auto img = decode_request_image(req);
      const auto& profile = styles_.at(string_field(req, "style"));
      return stage_response(img, profile);
    });
  }

  ServiceResponse interpolate(const std::string& body) const {
    return guarded([&] {
      const auto req = parse(body);
      const auto img = decode_request_image(req);
      const auto& a = styles_.at(string_field(req, "style_a"));
      const auto& b = styles_.at(string_field(req, "style_b"));
      if (!req.contains("t") || !req["t"].is_number()) {
        throw Error(ErrorCode::kInvalidArgument, "field 't' must be a number");
      }
      const auto mixed = interpolate_styles(a, b, req["t"].get<double>());
      return stage_response(img, mixed);
    });
  }

  ServiceResponse chain(const std::string& body) const {
    return guarded([&] {
      const auto req = parse(body);
      Image8 cur = decode_request_image(req);
      if (!req.contains("styles") || !req["styles"].is_array() || req["styles"].empty()) {
        throw Error(ErrorCode::kInvalidArgument, "field 'styles' must be a nonempty array");
      }
      Json stages = Json::array();
      ServiceResponse last;
      for (const auto& name : req["styles"]) {
        if (!name.is_string()) {
          throw Error(ErrorCode::kInvalidArgument, "style names must be strings");
        }
        const auto& profile = styles_.at(name.get<std::string>());
        const auto pred = predict(profile, cur);
        cur = tonecc::enhance(cur, pred.tf, pred.ccm);
        stages.push_back(
            {{"style", profile.name}, {"tf", to_json(pred.tf)}, {"ccm", to_json(pred.ccm)}});
      }
      Json out;
      out["image"] = base64::encode(encode_png(cur));
      out["tf"] = stages.back()["tf"];
      out["ccm"] = stages.back()["ccm"];
      out["stages"] = std::move(stages);
      return ServiceResponse{200, std::move(out)};
    });
  }

  /// Registers every route on `server`.
  void install(httplib::Server& server) const {
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json; charset=utf-8");
    };
    server.Get("/healthz", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, healthz());
    });
    server.Get("/styles", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, list_styles());
    });
    server.Post("/enhance", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, enhance(req.body));
    });
    server.Post("/interpolate",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, interpolate(req.body));
                });
    server.Post("/chain", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, chain(req.body));
    });
    // Lets a browser UI served from another origin call the API.
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
  }

  const StyleSet& styles() const noexcept { return styles_; }

 private:
  static int http_status(ErrorCode code) {
    switch (code) {
      case ErrorCode::kNotFound: return 404;
      case ErrorCode::kIoFailure: return 500;
      default: return 400;
    }
  }

  template <typename Fn>
  static ServiceResponse guarded(Fn&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      return {http_status(e.code()),
              {{"error", e.what()}, {"code", std::string(to_string(e.code()))}}};
    } catch (const std::exception& e) {
      return {500, {{"error", e.what()}, {"code", "internal"}}};
    }
  }

  static Json parse(const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    }
    return j;
  }

  static std::string string_field(const Json& req, const char* key) {
    if (!req.contains(key) || !req[key].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key +
                                                   "' must be a string");
    }
    return req[key].get<std::string>();
  }

  static Image8 decode_request_image(const Json& req) {
    const auto bytes = base64::decode(string_field(req, "image"));
    try {
      return decode_image(bytes);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("image: ") + e.what());
    }
  }

  static ServiceResponse stage_response(const Image8& img, const StyleProfile& profile) {
    const auto pred = predict(profile, img);
    const auto out = tonecc::enhance(img, pred.tf, pred.ccm);
    return {200,
            {{"image", base64::encode(encode_png(out))},
             {"tf", to_json(pred.tf)},
             {"ccm", to_json(pred.ccm)}}};
  }

  StyleSet styles_;
};

}  // namespace tonecc
