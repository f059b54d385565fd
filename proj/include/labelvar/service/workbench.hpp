#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "labelvar/service/session.hpp"

namespace labelvar::service {

using Json = nlohmann::ordered_json;
using Params = std::map<std::string, std::string>;

// An error with its HTTP status. The body sent to clients is
// {"code", "message", "detail"}.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message, Json detail = Json::object());

  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const Json& detail() const { return detail_; }
  Json body() const;

 private:
  int status_;
  std::string code_;
  Json detail_;
};

struct ImageBytes {
  std::string media_type;
  std::string bytes;
};

// Transport-independent implementation of every endpoint. Methods take parsed
// request bodies or query parameters and return response documents; failures
// are ApiError. Safe to call from many threads at once.
class Workbench {
 public:
  // POST /load {"manifest", "tie_policy"?, "threshold"?}
  Json load(const Json& body);
  // GET /session/{id}
  Json info(const std::string& id) const;
  // POST /session/{id}/gt {"column", "threshold"?}
  Json set_ground_truth(const std::string& id, const Json& body);
  // POST /session/{id}/query {"text" | "keys", "combine"?, "name"?}
  Json query(const std::string& id, const Json& body);
  // GET /session/{id}/metrics?pred=&scope=all|selection
  Json metrics(const std::string& id, const Params& params) const;
  // GET /session/{id}/widget/{name}
  Json widget(const std::string& id, const std::string& name, const Params& params) const;
  // GET /session/{id}/image/{scan}?layers=raw,boxes,heatmap
  Json image(const std::string& id, const std::string& scan, const Params& params) const;
  // GET /session/{id}/image/{scan}?format=png&layer=raw|heatmap
  ImageBytes image_bytes(const std::string& id, const std::string& scan, const Params& params) const;
  // GET /session/{id}/state
  Json save_state(const std::string& id) const;
  // POST /session/{id}/state: a new session on the same dataset
  Json restore_state(const std::string& id, const Json& document);

  std::size_t session_count() const;

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  std::string register_session(SessionState state);

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace labelvar::service
