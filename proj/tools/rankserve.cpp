#include "CLI11.hpp"
#include "httplib.h"

#include "ordertope/rankserve.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Read-only ranking queries over an analysis bundle", "rankserve"};
  std::string bundle_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  ordertope::serve::ServerOptions options;
  app.add_option("--bundle", bundle_path, "Bundle JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "Listen address");
  app.add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  app.add_option("--allow-origin", options.allow_origins, "Origin allowed cross-origin access (repeatable, * for any)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::unique_ptr<ordertope::serve::RankService> service;
  try {
    service = std::make_unique<ordertope::serve::RankService>(
        ordertope::io::bundle_from_json(ordertope::io::read_json(bundle_path)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << bundle_path << ": " << e.what() << '\n';
    return 1;
  }

  httplib::Server server;
  ordertope::serve::mount(server, *service, options);
  if (port == 0) {
    port = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    port = -1;
  }
  if (port < 0) {
    std::cerr << "error: cannot listen on " << host << '\n';
    return 1;
  }
  const auto& m = service->bundle().scores;
  std::cout << "rankserve: " << m.size() << " entities, " << m.dim() << " categories on http://" << host << ':'
            << port << std::endl;
  return server.listen_after_bind() ? 0 : 1;
}
