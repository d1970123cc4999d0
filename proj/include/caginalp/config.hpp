#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "caginalp/problem.hpp"

namespace caginalp {

/// Parsed `[section]` / `key = value` text. Comments start with '#' or ';'.
/// Keys are tracked so that anything left unread can be reported.
class IniDocument {
 public:
  static IniDocument parse(const std::string& text, const std::string& origin);
  static IniDocument load(const std::filesystem::path& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  /// Raw value; marks the key as used. ConfigError naming [section].key if
  /// absent.
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double real(const std::string& section, const std::string& key) const;
  double real_or(const std::string& section, const std::string& key,
                 double fallback) const;
  int integer(const std::string& section, const std::string& key) const;
  int integer_or(const std::string& section, const std::string& key,
                 int fallback) const;
  bool boolean_or(const std::string& section, const std::string& key,
                  bool fallback) const;

  /// ConfigError for sections outside `allowed` or keys never read.
  void reject_unknown(const std::vector<std::string>& allowed) const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  const Entry* find(const std::string& section, const std::string& key) const;
};

struct VerifySettings {
  std::uint64_t seed = 20240611;
  bool inject_adjoint_fault = false;
};

struct OutputSettings {
  std::filesystem::path dir;
  /// Time levels whose state is written by `simulate`.
  std::vector<int> slices;
};

struct RunConfig {
  std::filesystem::path source;
  Problem problem;
  bool has_cost = false;
  bool has_admissible = false;
  VerifySettings verify;
  OutputSettings output;
  /// Non-fatal findings, e.g. hypotheses that only hold in the weak sense.
  std::vector<std::string> warnings;
  /// Canonical text of the run: every key with its effective value and
  /// absolute paths. Loading it reproduces the run.
  std::string effective;
};

/// Reads, validates and resolves a run configuration. Relative paths are
/// taken relative to the directory of the config file. Throws ConfigError
/// with the offending [section].key in the message.
RunConfig load_config(const std::filesystem::path& path);

RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir,
                       const std::string& origin);

}  // namespace caginalp
