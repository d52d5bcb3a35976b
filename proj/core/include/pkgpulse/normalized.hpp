#pragma once

#include <filesystem>
#include <iosfwd>

#include "pkgpulse/corpus.hpp"

namespace pkgpulse {

/// Writes the normalized layout:
///
///   <out>/manifest.json              distributions, counts, parse-error totals
///   <out>/developers.tsv             developer id, display name
///   <out>/<distro>/packages.jsonl    one package per line
///   <out>/<distro>/edges.tsv         dependent, dependee
///   <out>/<distro>/devs.tsv          package, developer
///   <out>/<distro>/bugs.tsv          bug id, package
///   <out>/<distro>/activity.tsv      developer, high, medium, low, other, bugs_closed
///
/// Every file is byte-stable: rows sorted, JSON keys sorted.
void write_normalized(const std::filesystem::path& out_dir, const Dataset& dataset);

/// Inverse of write_normalized. Throws std::runtime_error on malformed files.
Dataset load_normalized(const std::filesystem::path& dir);

void write_edges_tsv(std::ostream& os, const Snapshot& snapshot);
void write_devs_tsv(std::ostream& os, const Snapshot& snapshot);

}  // namespace pkgpulse
