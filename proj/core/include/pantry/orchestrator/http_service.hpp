#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "pantry/kb/knowledge_base.hpp"
#include "pantry/orchestrator/orchestrator.hpp"

namespace pantry::orchestrator {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  std::optional<std::filesystem::path> plot_data;  // served at GET /plot-data
};

/// JSON API over an Orchestrator. Reads run concurrently; mutations go through the
/// orchestrator, which serializes them.
class HttpService {
 public:
  HttpService(Orchestrator& orchestrator, kb::KnowledgeBase& store, ServiceOptions options = {});
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1 on failure.
  int bind(int port = 0);
  /// Blocks serving requests until stop() is called.
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pantry::orchestrator
