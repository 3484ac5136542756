#pragma once

#include <memory>
#include <optional>
#include <string>

namespace rankstrat {

/// Read-only HTTP server for an exported bundle: GET /bundle.json returns
/// the bundle bytes verbatim, other GETs are served from `ui_dir` (or a
/// placeholder index page when no UI assets are installed).
class BundleServer {
 public:
  BundleServer(std::string bundle, std::optional<std::string> ui_dir = std::nullopt);
  ~BundleServer();
  BundleServer(const BundleServer&) = delete;
  BundleServer& operator=(const BundleServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port. Throws IoError.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rankstrat
