#include "multimapper/service.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>

#include <httplib.h>

#include "multimapper/errors.hpp"
#include "multimapper/fixtures.hpp"

namespace mm {
namespace {

namespace fs = std::filesystem;
using Clock = fs::file_time_type::clock;

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump(body), kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, Json{{"error", message}});
}

Json parse_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? Json::object() : Json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("request body is not JSON: ") + e.what());
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bad field '") + key + "': " + e.what());
  }
}

// Maps library failures onto HTTP statuses: bad input is the client's fault,
// disk trouble is ours.
void reply_exception(httplib::Response& res, const Error& e) {
  const int status = (e.kind() == ErrorKind::Io || e.kind() == ErrorKind::CorruptSession) ? 500 : 400;
  reply_error(res, status, e.what());
}

}  // namespace

struct Service::Entry {
  fs::path dir;
  std::mutex snapshot_mutex;  // guards the pointer only
  std::shared_ptr<const Session> snapshot;
  std::mutex commit_mutex;  // disk writes and snapshot replacement
  std::atomic<bool> pending{false};
  std::atomic<Clock::rep> last_used{0};

  std::shared_ptr<const Session> read() {
    const std::lock_guard lock(snapshot_mutex);
    return snapshot;
  }

  // Caller holds commit_mutex.
  void commit(std::shared_ptr<const Session> next) {
    save_session(*next, dir / "session.json");
    const std::lock_guard lock(snapshot_mutex);
    snapshot = std::move(next);
  }

  void touch() { last_used = Clock::now().time_since_epoch().count(); }
};

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  std::error_code ec;
  fs::create_directories(config_.data_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create data dir " + config_.data_dir.string() + ": " + ec.message());
}

Service::~Service() = default;

std::string Service::new_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << rng();
  return out.str();
}

std::shared_ptr<Service::Entry> Service::insert(const std::string& id, Session session) {
  auto entry = std::make_shared<Entry>();
  entry->dir = config_.data_dir / id;
  entry->snapshot = std::make_shared<const Session>(std::move(session));
  entry->touch();
  const std::lock_guard lock(table_mutex_);
  sessions_[id] = entry;
  return entry;
}

std::shared_ptr<Service::Entry> Service::find(const std::string& id) {
  const auto ttl = std::chrono::duration_cast<Clock::duration>(config_.ttl);
  {
    const std::lock_guard lock(table_mutex_);
    if (const auto it = sessions_.find(id); it != sessions_.end()) {
      const auto idle = Clock::now() - Clock::time_point(Clock::duration(it->second->last_used.load()));
      if (idle <= ttl || it->second->pending) {
        it->second->touch();
        return it->second;
      }
      sessions_.erase(it);
      std::error_code ec;
      fs::remove_all(config_.data_dir / id, ec);
      return nullptr;
    }
  }
  // Not in memory: a previous process may have left it on disk.
  const fs::path file = config_.data_dir / id / "session.json";
  std::error_code ec;
  const auto written = fs::last_write_time(file, ec);
  if (ec) return nullptr;
  if (Clock::now() - written > ttl) {
    fs::remove_all(config_.data_dir / id, ec);
    return nullptr;
  }
  return insert(id, load_session(file));
}

void Service::expire_idle() {
  const auto ttl = std::chrono::duration_cast<Clock::duration>(config_.ttl);
  const auto now = Clock::now();
  std::vector<std::string> loaded;
  {
    const std::lock_guard lock(table_mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      const auto idle = now - Clock::time_point(Clock::duration(it->second->last_used.load()));
      if (idle > ttl && !it->second->pending) {
        std::error_code ec;
        fs::remove_all(config_.data_dir / it->first, ec);
        it = sessions_.erase(it);
      } else {
        loaded.push_back(it->first);
        ++it;
      }
    }
  }
  std::error_code ec;
  for (const auto& dirent : fs::directory_iterator(config_.data_dir, ec)) {
    const std::string id = dirent.path().filename().string();
    if (std::find(loaded.begin(), loaded.end(), id) != loaded.end()) continue;
    std::error_code stat_ec;
    const auto written = fs::last_write_time(dirent.path() / "session.json", stat_ec);
    if (!stat_ec && now - written > ttl) fs::remove_all(dirent.path(), stat_ec);
  }
}

void Service::mount(httplib::Server& server) {
  server.set_payload_max_length(config_.payload_limit);
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    expire_idle();
    const std::string id = new_id();
    const fs::path dir = config_.data_dir / id;
    try {
      const Json body = parse_body(req);
      fs::create_directories(dir);
      SessionConfig cfg;
      cfg.points = dir / "points.csv";
      if (body.contains("points_csv")) {
        write_text_file(cfg.points, field_or<std::string>(body, "points_csv", ""));
      } else if (body.contains("fixture")) {
        const PointCloud pc = fixtures::make(field_or<std::string>(body, "fixture", ""),
                                             field_or<std::uint64_t>(body, "seed", 7),
                                             field_or<std::size_t>(body, "n", 0), field_or<int>(body, "k", 3));
        write_text_file(cfg.points, fixtures::to_csv(pc));
      } else {
        throw Error(ErrorKind::InvalidArgument, "need points_csv or fixture");
      }
      if (body.contains("lens_csv")) {
        cfg.lens_csv = dir / "lens.csv";
        write_text_file(cfg.lens_csv, field_or<std::string>(body, "lens_csv", ""));
      }
      cfg.lens_spec = field_or<std::string>(body, "lens", "coord:0,1");
      if (body.contains("cover")) cfg.cover = cover_spec_from_json(body.at("cover"));
      cfg.params = ClusterParams::parse(field_or<std::string>(body, "cluster", "dbscan:auto"));
      cfg.dim_cap = field_or<int>(body, "dim_cap", kDefaultDimCap);
      Session session = create_session(cfg);
      save_session(session, dir / "session.json");
      const auto entry = insert(id, std::move(session));
      const auto snap = entry->read();
      reply(res, 201,
            {{"session_id", id},
             {"complex", to_json(snap->state.complex)},
             {"report", to_json(snap->state.report)},
             {"summary", summary_json(snap->state.complex)}});
    } catch (const Error& e) {
      std::error_code ec;
      fs::remove_all(dir, ec);
      reply_exception(res, e);
    } catch (const fs::filesystem_error& e) {
      reply_error(res, 500, e.what());
    }
  });

  server.Get(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto entry = find(req.matches[1]);
      if (!entry) return reply_error(res, 404, "unknown session");
      const auto snap = entry->read();
      Json body = session_to_json(*snap);
      body["session_id"] = req.matches[1].str();
      body["summary"] = summary_json(snap->state.complex);
      reply(res, 200, body);
    } catch (const Error& e) {
      reply_exception(res, e);
    }
  });

  server.Post(R"(/sessions/([0-9a-f]+)/magnify)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_ptr<Entry> entry;
    try {
      entry = find(id);
    } catch (const Error& e) {
      return reply_exception(res, e);
    }
    if (!entry) return reply_error(res, 404, "unknown session");
    bool expected = false;
    if (!entry->pending.compare_exchange_strong(expected, true)) {
      return reply_error(res, 409, "a mutation is already in flight for this session");
    }
    struct Release {
      std::atomic<bool>& flag;
      ~Release() { flag = false; }
    } release{entry->pending};
    try {
      if (config_.mutation_hook) config_.mutation_hook(id);
      const auto snap = entry->read();
      const Json body = parse_body(req);
      MagnifyRequest defaults;
      defaults.cover = {snap->base_spec.scheme, 2, snap->base_spec.g};
      defaults.params = snap->state.params;
      Json plain = body;
      double factor = 0.0;
      if (body.contains("cover") && body.at("cover").is_object() && body.at("cover").contains("factor")) {
        factor = field_or<double>(body.at("cover"), "factor", 0.0);
        plain["cover"].erase("factor");
      }
      MagnifyRequest request = magnify_request_from_json(plain, defaults);
      if (factor != 0.0) request.cover.bins_per_axis = relative_bins(snap->state, request.node_ids, factor);
      MagnifyOutcome outcome = apply_magnify(*snap, request);
      auto next = std::make_shared<const Session>(std::move(outcome.session));
      {
        const std::lock_guard lock(entry->commit_mutex);
        entry->commit(next);
      }
      reply(res, 200,
            {{"complex", to_json(next->state.complex)},
             {"degeneracy_points", outcome.degeneracy_points},
             {"nodes_before", outcome.nodes_before},
             {"nodes_after", outcome.nodes_after},
             {"region_log_length", next->state.region_log.size()},
             {"request", to_json(request)},
             {"summary", summary_json(next->state.complex)}});
    } catch (const Error& e) {
      reply_exception(res, e);
    }
  });

  server.Post(R"(/sessions/([0-9a-f]+)/diagnose)", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto entry = find(req.matches[1]);
      if (!entry) return reply_error(res, 404, "unknown session");
      const Json body = parse_body(req);
      const DiagnoseMethod method = parse_method(field_or<std::string>(body, "method", "clustering"));
      const int levels = field_or<int>(body, "levels", 5);
      const int max_dim = field_or<int>(body, "max_dim", kDefaultDiagnoseDim);
      const auto snap = entry->read();
      const Json result = to_json(diagnose(snap->state, method, levels, max_dim));
      {
        // Record the report unless a mutation replaced the snapshot meanwhile.
        const std::lock_guard lock(entry->commit_mutex);
        if (entry->read() == snap) {
          auto next = std::make_shared<Session>(*snap);
          next->reports["diagnose"] = result;
          entry->commit(std::move(next));
        }
      }
      reply(res, 200, result);
    } catch (const Error& e) {
      reply_exception(res, e);
    }
  });
}

int serve(const ServiceConfig& config, const std::string& host, int port) {
  Service service(config);
  httplib::Server server;
  service.mount(server);
  if (!server.listen(host, port)) return 3;
  return 0;
}

}  // namespace mm
