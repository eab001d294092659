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

// JSON HTTP API under /v1.
//
// ApiService is transport-free: Handle() maps a request to a status and a
// JSON body. HttpServer binds it to a socket and optionally serves a static
// directory at "/". Failures use the body {code, message, detail}.

#ifndef FABLEGEN_API_H_
#define FABLEGEN_API_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "fablegen/corpus.h"
#include "fablegen/error.h"
#include "fablegen/pipeline.h"
#include "fablegen/session.h"

namespace fablegen::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

int HttpStatus(ErrorCode code);
Response ErrorResponse(const Error &error);

class ApiService {
 public:
  ApiService(std::shared_ptr<const corpus::Corpus> corpus, pipeline::PipelineConfig config,
             session::ServiceOptions options);

  Response Handle(const Request &request);

  session::SessionService &sessions() { return *sessions_; }

 private:
  nlohmann::json Route(const Request &request, int *status);

  std::shared_ptr<const corpus::Corpus> corpus_;
  pipeline::PipelineConfig config_;
  std::shared_ptr<session::QuestionBank> bank_;
  std::unique_ptr<session::SessionService> sessions_;
};

class HttpServer {
 public:
  HttpServer(ApiService *service, std::optional<std::filesystem::path> static_dir);
  ~HttpServer();
  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Binds (port 0 picks a free port) and returns the bound port.
  int Bind(const std::string &host, int port);
  // Blocks until Stop().
  void Listen();
  // For a Listen() running on another thread.
  void WaitUntilReady() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fablegen::api

#endif  // FABLEGEN_API_H_
