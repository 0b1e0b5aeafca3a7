#include "kiwi/common.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <vector>

namespace kiwi {

std::string strformat(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  if (n < 0) {
    va_end(args);
    return fmt;
  }
  std::vector<char> buf(static_cast<size_t>(n) + 1);
  std::vsnprintf(buf.data(), buf.size(), fmt, args);
  va_end(args);
  return std::string(buf.data(), static_cast<size_t>(n));
}

namespace log {
namespace {

Level parse_env_level() {
  const char* env = std::getenv("KIWI_LOG");
  if (env == nullptr) return Level::Info;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  if (std::strcmp(env, "warn") == 0) return Level::Warn;
  if (std::strcmp(env, "error") == 0) return Level::Error;
  if (std::strcmp(env, "off") == 0) return Level::Off;
  return Level::Info;
}

Level& level_ref() {
  static Level level = parse_env_level();
  return level;
}

const char* level_name(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    default: return "?";
  }
}

}  // namespace

Level level() { return level_ref(); }
void set_level(Level level) { level_ref() = level; }

void message(Level level, const std::string& text) {
  if (level < level_ref()) return;
  std::fprintf(stderr, "[kiwi %s] %s\n", level_name(level), text.c_str());
}

}  // namespace log
}  // namespace kiwi
