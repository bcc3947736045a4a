#include "httplib.h"

#include "ordertope/rankserve.hpp"

#include <algorithm>
#include <functional>

namespace ordertope::serve {

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::optional<std::string> param(const httplib::Request& req, const std::string& key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

std::string required(const httplib::Request& req, const std::string& key) {
  auto v = param(req, key);
  if (!v) throw QueryError(400, "missing_parameter", "missing query parameter '" + key + "'");
  return *v;
}

std::optional<std::size_t> count(const httplib::Request& req, const std::string& key) {
  auto v = param(req, key);
  if (!v) return std::nullopt;
  return parse_count_param(key, *v);
}

using Handler = std::function<json(const httplib::Request&)>;

httplib::Server::Handler wrap(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, h(req));
    } catch (const QueryError& e) {
      send(res, e.status(), e.body());
    } catch (const std::exception& e) {
      send(res, 500, {{"code", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

void mount(httplib::Server& server, const RankService& service, const ServerOptions& options) {
  const RankService* s = &service;
  server.Get("/rank", wrap([s](const httplib::Request& req) {
               return s->rank(parse_weight_param(required(req, "w")), count(req, "k"));
             }));
  server.Get("/intervals", wrap([s](const httplib::Request& req) {
               std::optional<Rational> coverage;
               if (auto c = param(req, "coverage")) {
                 try {
                   coverage = parse_rational(*c);
                 } catch (const std::exception&) {
                   throw QueryError(400, "bad_coverage", "malformed coverage '" + *c + "'");
                 }
               }
               return s->intervals(coverage, param(req, "entity"));
             }));
  server.Get("/pairwise", wrap([s](const httplib::Request& req) {
               return s->pairwise(required(req, "a"), required(req, "b"));
             }));
  server.Get("/envelope", wrap([s](const httplib::Request& req) { return s->envelope(count(req, "k")); }));
  server.Get("/meta", wrap([s](const httplib::Request&) { return s->meta(); }));

  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_post_routing_handler([origins = options.allow_origins](const httplib::Request& req,
                                                                    httplib::Response& res) {
    if (origins.empty() || !req.has_header("Origin")) return;
    const std::string origin = req.get_header_value("Origin");
    const bool any = std::find(origins.begin(), origins.end(), "*") != origins.end();
    if (!any && std::find(origins.begin(), origins.end(), origin) == origins.end()) return;
    res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Vary", "Origin");
  });
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      send(res, 404, {{"code", "not_found"}, {"message", "no endpoint " + req.path}});
    }
  });
}

}  // namespace ordertope::serve
