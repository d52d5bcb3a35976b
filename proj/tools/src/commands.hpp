#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pkgpulse/synth.hpp"

namespace pkgpulse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace fs = std::filesystem;

/// Streams for human-readable progress and errors.
struct Console {
  std::ostream& out;
  std::ostream& err;
};

int cmd_ingest(const fs::path& raw_dir, const fs::path& out_dir, Console io);
int cmd_synth(const SynthConfig& config, const fs::path& out_dir, Console io);

/// Pipeline runs write report files into <out_root>/<kind>-<id>, where id
/// hashes the resolved config and the dataset manifest. An existing run
/// directory is left untouched.
int cmd_urgency(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_root,
                std::optional<std::uint64_t> seed, Console io);
int cmd_devrec(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_root,
               std::optional<std::uint64_t> seed, Console io);
int cmd_baseline(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_root,
                 std::optional<std::uint64_t> seed, Console io);

/// Writes the comparison JSON to `out_file` when given, else to io.out.
int cmd_eval(const fs::path& run_a, const fs::path& run_b, const std::optional<fs::path>& out_file, Console io);

/// 16 hex digits of FNV-1a over the dataset's manifest.json.
std::string dataset_id(const fs::path& data_dir);
std::string run_id(const std::string& kind, const nlohmann::json& resolved_config, const std::string& dataset);

/// Entry point behind main(); argv[0] is the program name.
int run_cli(int argc, const char* const* argv, Console io);

}  // namespace pkgpulse::cli
