#include "newsseg/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <optional>

namespace newsseg::log {

namespace {

std::optional<Level> g_override;
std::mutex g_mutex;

Level env_level() {
  const char* env = std::getenv("NEWSSEG_LOG");
  if (env == nullptr) return Level::Warn;
  if (std::strcmp(env, "error") == 0) return Level::Error;
  if (std::strcmp(env, "warn") == 0) return Level::Warn;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  return Level::Warn;
}

const char* tag(Level lvl) {
  switch (lvl) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
  }
  return "?";
}

}  // namespace

Level level() {
  std::lock_guard<std::mutex> lock(g_mutex);
  return g_override ? *g_override : env_level();
}

void set_level(Level lvl) {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_override = lvl;
}

void write(Level lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(level())) return;
  std::fprintf(stderr, "newsseg [%s] %s\n", tag(lvl), msg.c_str());
}

}  // namespace newsseg::log
