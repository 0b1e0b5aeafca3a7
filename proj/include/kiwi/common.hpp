#pragma once

#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace kiwi {

// Base class for all toolkit errors. Subcommands catch this at the top
// level and turn it into a one-line diagnostic plus a nonzero exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad or inconsistent input data (files, tags, alignments).
class DataError : public Error {
 public:
  using Error::Error;
};

// Configuration problems: unknown keys, missing files, schema violations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical problems: shape mismatches, non-finite values, bad graphs.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// Undefined metric values (zero variance, degenerate inputs).
class MetricError : public Error {
 public:
  using Error::Error;
};

// Training aborts: NaN loss, locked run directory, snapshot failures.
class TrainError : public Error {
 public:
  using Error::Error;
};

// printf-style formatting into a std::string.
std::string strformat(const char* fmt, ...);

namespace log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Level comes from KIWI_LOG (debug|info|warn|error|off) on first use and
// can be overridden programmatically.
Level level();
void set_level(Level level);

void message(Level level, const std::string& text);

inline void debug(const std::string& text) { message(Level::Debug, text); }
inline void info(const std::string& text) { message(Level::Info, text); }
inline void warn(const std::string& text) { message(Level::Warn, text); }
inline void error(const std::string& text) { message(Level::Error, text); }

}  // namespace log
}  // namespace kiwi
