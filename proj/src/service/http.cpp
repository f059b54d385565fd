#include "labelvar/service/http.hpp"

#include "httplib.h"

#include "labelvar/service/workbench.hpp"

namespace labelvar::service {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Params params_of(const httplib::Request& req) {
  Params out;
  for (const auto& [k, v] : req.params) out.emplace(k, v);
  return out;
}

Json body_of(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ApiError(400, "bad_json", "request body is not valid JSON", {{"reason", e.what()}});
  }
}

// Wraps an endpoint so every failure becomes a {code, message, detail} body.
template <class F>
httplib::Server::Handler endpoint(F body) {
  return [body](const httplib::Request& req, httplib::Response& res) {
    try {
      body(req, res);
    } catch (const ApiError& e) {
      send_json(res, e.status(), e.body());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"code", "internal"}, {"message", e.what()}, {"detail", Json::object()}});
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, Workbench& bench) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server.Get("/health", endpoint([&bench](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, {{"status", "ok"}, {"sessions", bench.session_count()}});
             }));
  server.Post("/load", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, bench.load(body_of(req)));
              }));
  server.Get(R"(/session/([^/]+))", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, bench.info(req.matches[1]));
             }));
  server.Post(R"(/session/([^/]+)/gt)", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, bench.set_ground_truth(req.matches[1], body_of(req)));
              }));
  server.Post(R"(/session/([^/]+)/query)", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, bench.query(req.matches[1], body_of(req)));
              }));
  server.Get(R"(/session/([^/]+)/metrics)", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, bench.metrics(req.matches[1], params_of(req)));
             }));
  server.Get(R"(/session/([^/]+)/widget/([^/]+))",
             endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, bench.widget(req.matches[1], req.matches[2], params_of(req)));
             }));
  server.Get(R"(/session/([^/]+)/image/([^/]+))",
             endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
               const Params params = params_of(req);
               if (auto it = params.find("format"); it != params.end() && it->second == "png") {
                 const ImageBytes image = bench.image_bytes(req.matches[1], req.matches[2], params);
                 res.status = 200;
                 res.set_content(image.bytes, image.media_type.c_str());
                 return;
               }
               send_json(res, 200, bench.image(req.matches[1], req.matches[2], params));
             }));
  server.Get(R"(/session/([^/]+)/state)", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, bench.save_state(req.matches[1]));
             }));
  server.Post(R"(/session/([^/]+)/state)", endpoint([&bench](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, bench.restore_state(req.matches[1], body_of(req)));
              }));
}

bool serve(Workbench& bench, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, bench);
  return server.listen(host, port);
}

}  // namespace labelvar::service
