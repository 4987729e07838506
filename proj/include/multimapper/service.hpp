#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "multimapper/session.hpp"

namespace httplib {
class Server;
}

namespace mm {

struct ServiceConfig {
  std::filesystem::path data_dir;
  std::chrono::seconds ttl = std::chrono::hours(24);
  std::size_t payload_limit = 50u * 1024u * 1024u;
  // Runs inside a mutation after the pending flag is taken; tests use it to
  // hold a mutation open.
  std::function<void(const std::string& session_id)> mutation_hook;
};

// HTTP front end over sessions persisted in data_dir/<id>/. Each session keeps
// its latest committed snapshot behind a shared_ptr: readers copy the pointer
// and never wait on a mutation, writers are serialized by a pending flag and
// conflicting writes get 409.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Registers routes, CORS handling and the payload limit on `server`.
  void mount(httplib::Server& server);

  // Drops sessions idle for longer than the TTL, in memory and on disk.
  void expire_idle();

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id);
  std::shared_ptr<Entry> insert(const std::string& id, Session session);
  std::string new_id();

  ServiceConfig config_;
  std::mutex table_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

// Blocking server loop; returns when the listener stops.
int serve(const ServiceConfig& config, const std::string& host, int port);

}  // namespace mm
