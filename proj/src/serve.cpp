#include "rankstrat/serve.hpp"

#include "httplib.h"
#include "rankstrat/errors.hpp"

namespace rankstrat {

namespace {

constexpr const char* kPlaceholderIndex = R"(<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>Rank strategy explorer</title></head>
<body>
<h1>Rank strategy explorer</h1>
<p>The explorer UI assets are not installed on this server.
The exported bundle is available at <a href="/bundle.json">/bundle.json</a>.</p>
</body>
</html>
)";

}  // namespace

struct BundleServer::Impl {
  std::string bundle;
  httplib::Server server;
};

BundleServer::BundleServer(std::string bundle, std::optional<std::string> ui_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->bundle = std::move(bundle);
  auto& svr = impl_->server;
  svr.Get("/bundle.json", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(impl_->bundle, "application/json");
  });
  if (ui_dir && !svr.set_mount_point("/", *ui_dir)) {
    throw IoError("UI asset directory '" + *ui_dir + "' does not exist");
  }
  if (!ui_dir) {
    svr.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderIndex, "text/html");
    });
  }
  // Read-only: everything except GET/HEAD is refused.
  auto refuse = [](const httplib::Request&, httplib::Response& res) { res.status = 405; };
  svr.Post(".*", refuse);
  svr.Put(".*", refuse);
  svr.Delete(".*", refuse);
  svr.Patch(".*", refuse);
}

BundleServer::~BundleServer() { stop(); }

int BundleServer::bind(const std::string& host, int port) {
  auto& svr = impl_->server;
  const int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void BundleServer::listen() { impl_->server.listen_after_bind(); }

void BundleServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace rankstrat
