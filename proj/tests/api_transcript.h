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

// Recorded API transcripts: a JSON array of
//   {"request": {"method", "path", "query"?, "body"?},
//    "response": {"status", "body"}}
// Paths may contain "{session}", replaced by the id returned from the most
// recent POST /v1/sessions. Responses are compared after masking session
// ids and timestamps, so a transcript replays against any fresh server.

#ifndef FABLEGEN_TESTS_API_TRANSCRIPT_H_
#define FABLEGEN_TESTS_API_TRANSCRIPT_H_

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fablegen/api.h"
#include "httplib.h"
#include "json.hpp"

namespace fablegen::testing {

using Send = std::function<api::Response(const api::Request &)>;

inline void ReplaceAll(std::string *s, const std::string &from, const std::string &to) {
  if (from.empty()) return;
  for (size_t at = s->find(from); at != std::string::npos; at = s->find(from, at + to.size())) {
    s->replace(at, from.size(), to);
  }
}

inline nlohmann::json Mask(nlohmann::json j, const std::set<std::string> &session_ids) {
  static const std::set<std::string> kTimeKeys = {"created_at", "updated_at", "answered_at",
                                                  "at"};
  if (j.is_object()) {
    for (auto &[k, v] : j.items()) {
      if (kTimeKeys.count(k) > 0 && v.is_string()) {
        v = "<time>";
      } else {
        v = Mask(v, session_ids);
      }
    }
  } else if (j.is_array()) {
    for (auto &v : j) v = Mask(v, session_ids);
  } else if (j.is_string()) {
    std::string s = j.get<std::string>();
    for (const auto &id : session_ids) ReplaceAll(&s, id, "<session>");
    j = s;
  }
  return j;
}

inline api::Request ToRequest(const nlohmann::json &r, const std::string &session) {
  api::Request req;
  req.method = r.at("method").get<std::string>();
  req.path = r.at("path").get<std::string>();
  ReplaceAll(&req.path, "{session}", session);
  if (r.contains("query")) {
    for (auto &[k, v] : r["query"].items()) req.query[k] = v.get<std::string>();
  }
  if (r.contains("body")) {
    req.body = r["body"].is_string() ? r["body"].get<std::string>() : r["body"].dump();
  }
  return req;
}

// Sends requests to a server on 127.0.0.1:port.
inline Send HttpSend(int port) {
  return [port](const api::Request &r) {
    httplib::Client client("127.0.0.1", port);
    httplib::Params params(r.query.begin(), r.query.end());
    const std::string target = httplib::append_query_params(r.path, params);
    httplib::Result res;
    if (r.method == "GET") {
      res = client.Get(target);
    } else if (r.method == "POST") {
      res = client.Post(target, r.body, "application/json");
    } else if (r.method == "PUT") {
      res = client.Put(target, r.body, "application/json");
    } else if (r.method == "DELETE") {
      res = client.Delete(target);
    } else {
      throw std::runtime_error("unsupported method " + r.method);
    }
    if (!res) throw std::runtime_error("request failed: " + httplib::to_string(res.error()));
    return api::Response{res->status, res->body, res->get_header_value("Content-Type")};
  };
}

// Runs the requests of `script` and returns the masked transcript.
inline nlohmann::json Record(const nlohmann::json &script, const Send &send) {
  nlohmann::json out = nlohmann::json::array();
  std::set<std::string> ids;
  std::string session;
  for (const auto &entry : script) {
    const nlohmann::json &r = entry.contains("request") ? entry["request"] : entry;
    const api::Response resp = send(ToRequest(r, session));
    nlohmann::json body = nlohmann::json::parse(resp.body);
    if (r["method"] == "POST" && r["path"] == "/v1/sessions" && resp.status == 201) {
      session = body["session_id"].get<std::string>();
      ids.insert(session);
    }
    out.push_back({{"request", r}, {"response", {{"status", resp.status}, {"body", Mask(body, ids)}}}});
  }
  return out;
}

// Human-readable list of differing exchanges; empty when the replay matches.
inline std::vector<std::string> Diff(const nlohmann::json &expected, const nlohmann::json &actual) {
  std::vector<std::string> out;
  if (expected.size() != actual.size()) {
    out.push_back("exchange count " + std::to_string(actual.size()) + " != " +
                  std::to_string(expected.size()));
  }
  for (size_t i = 0; i < std::min(expected.size(), actual.size()); ++i) {
    if (expected[i]["response"].dump() != actual[i]["response"].dump()) {
      const auto &r = expected[i]["request"];
      out.push_back("#" + std::to_string(i) + " " + r["method"].get<std::string>() + " " +
                    r["path"].get<std::string>() + ": expected " + expected[i]["response"].dump() +
                    " got " + actual[i]["response"].dump());
    }
  }
  return out;
}

}  // namespace fablegen::testing

#endif  // FABLEGEN_TESTS_API_TRANSCRIPT_H_
