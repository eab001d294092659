// Copyright 2026 The Fablegen Authors.
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

#include "fablegen/api.h"

#include <vector>

#include "fablegen/text.h"
#include "httplib.h"

namespace fablegen::api {

using nlohmann::json;

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kBackendUnavailable:
      return 503;
    default:
      return 500;
  }
}

namespace {

Response JsonResponse(int status, const json &body) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Response Failure(int status, std::string_view code, const std::string &message,
                 const std::vector<std::string> &details = {}) {
  json detail = details.empty() ? json(nullptr) : json(details);
  return JsonResponse(status, {{"code", code}, {"message", message}, {"detail", detail}});
}

int ParseIndex(const std::string &text, std::string_view what) {
  size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::logic_error &) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be an integer, got '" + text + "'");
  }
  return value;
}

json ParseBody(const std::string &body) {
  if (Trim(body).empty()) return json::object();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kParse, "request body must be a JSON object");
  return j;
}

std::string StringField(const json &body, const std::string &key, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::kValidation, "missing field '" + key + "'");
    return "";
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::kValidation, "field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

json BookSummary(const corpus::Story &story) {
  return {{"story_id", story.story_id},
          {"title", story.title},
          {"split", corpus::SplitName(story.split)},
          {"section_count", story.sections.size()}};
}

// Method mismatch on a known route.
struct MethodNotAllowed {};

}  // namespace

Response ErrorResponse(const Error &error) {
  return Failure(HttpStatus(error.code()), ErrorCodeName(error.code()), error.what(),
                 error.details());
}

ApiService::ApiService(std::shared_ptr<const corpus::Corpus> corpus,
                       pipeline::PipelineConfig config, session::ServiceOptions options)
    : corpus_(std::move(corpus)), config_(config) {
  bank_ = std::make_shared<session::QuestionBank>(corpus_, config_);
  sessions_ = std::make_unique<session::SessionService>(bank_, std::move(options));
}

Response ApiService::Handle(const Request &request) {
  try {
    int status = 200;
    json body = Route(request, &status);
    return JsonResponse(status, body);
  } catch (const MethodNotAllowed &) {
    return Failure(405, "method_not_allowed",
                   request.method + " is not supported on " + request.path);
  } catch (const Error &e) {
    return ErrorResponse(e);
  } catch (const std::exception &e) {
    return Failure(500, ErrorCodeName(ErrorCode::kInternal), e.what());
  }
}

json ApiService::Route(const Request &request, int *status) {
  std::vector<std::string> parts;
  for (const auto &p : Split(request.path, '/')) {
    if (!p.empty()) parts.push_back(p);
  }
  const auto &m = request.method;
  const auto expect = [&](std::string_view method) {
    if (m != method) throw MethodNotAllowed{};
  };
  const size_t n = parts.size();
  if (n < 2 || parts[0] != "v1") {
    throw Error(ErrorCode::kNotFound, "no route for " + request.path);
  }

  if (parts[1] == "health" && n == 2) {
    expect("GET");
    return {{"status", "ok"}};
  }

  if (parts[1] == "books") {
    if (n == 2) {
      expect("GET");
      json books = json::array();
      for (const auto &s : corpus_->stories()) books.push_back(BookSummary(s));
      return {{"books", books}};
    }
    const corpus::Story &story = corpus_->GetStory(parts[2]);
    if (n == 3) {
      expect("GET");
      json j = BookSummary(story);
      json sections = json::array();
      for (const auto &sec : story.sections) sections.push_back(sec.index);
      j["sections"] = sections;
      return j;
    }
    if (n == 5 && parts[3] == "sections") {
      expect("GET");
      const int index = ParseIndex(parts[4], "section index");
      const corpus::Section *section = story.FindSection(index);
      if (section == nullptr) {
        throw Error(ErrorCode::kNotFound,
                    "story " + story.story_id + " has no section " + std::to_string(index));
      }
      return {{"story_id", story.story_id},
              {"section_index", section->index},
              {"section_count", story.sections.size()},
              {"text", section->text}};
    }
    if (n == 4 && parts[3] == "qag") {
      expect("POST");
      pipeline::PipelineConfig config = config_;
      auto it = request.query.find("top_n");
      if (it != request.query.end()) config.top_n = ParseIndex(it->second, "top_n");
      if (config.top_n < 1) throw Error(ErrorCode::kValidation, "top_n must be at least 1");
      return pipeline::ToJson(pipeline::Pipeline(config).Run(story), story.story_id);
    }
  }

  if (parts[1] == "sessions") {
    if (n == 2) {
      expect("POST");
      const json body = ParseBody(request.body);
      *status = 201;
      return sessions_->Create(StringField(body, "story_id", true));
    }
    const std::string &id = parts[2];
    if (n == 3) {
      expect("GET");
      return sessions_->Get(id);
    }
    if (n == 4) {
      const std::string &action = parts[3];
      if (action == "next") {
        expect("GET");
        return sessions_->Next(id);
      }
      if (action == "answer") {
        expect("POST");
        const json body = ParseBody(request.body);
        return sessions_->Answer(id, StringField(body, "question_id", true),
                                 StringField(body, "user_answer", false),
                                 StringField(body, "idempotency_key", false));
      }
      if (action == "advance") {
        expect("POST");
        return sessions_->Advance(id);
      }
      if (action == "progress") {
        expect("GET");
        return sessions_->Progress(id);
      }
    }
  }
  throw Error(ErrorCode::kNotFound, "no route for " + request.path);
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  ApiService *service = nullptr;
  httplib::Server server;
};

HttpServer::HttpServer(ApiService *service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = service;
  auto handler = [this](const httplib::Request &req, httplib::Response &res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto &[k, v] : req.params) r.query[k] = v;
    r.body = req.body;
    Response out = impl_->service->Handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  const char *pattern = R"(/v1(/.*)?)";
  impl_->server.Get(pattern, handler);
  impl_->server.Post(pattern, handler);
  impl_->server.Put(pattern, handler);
  impl_->server.Delete(pattern, handler);
  if (static_dir) {
    if (!std::filesystem::is_directory(*static_dir)) {
      throw Error(ErrorCode::kNotFound, "static directory not found: " + static_dir->string());
    }
    impl_->server.set_mount_point("/", static_dir->string());
  }
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string &host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kInternal,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::Listen() { impl_->server.listen_after_bind(); }

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace fablegen::api
