#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "pkgpulse/error.hpp"
#include "pkgpulse/normalized.hpp"
#include "pkgpulse/random.hpp"
#include "reports.hpp"

namespace pkgpulse::cli {

using nlohmann::json;

namespace {

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << contents;
  if (!out.flush()) throw std::runtime_error("write failed: " + p.string());
}

/// Writes into a scratch directory and renames it into place.
void publish(const fs::path& run_dir, const RunFiles& files) {
  fs::create_directories(run_dir.parent_path());
  const fs::path scratch = run_dir.parent_path() / ("." + run_dir.filename().string() + ".partial");
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  for (const auto& [name, contents] : files) write_file(scratch / name, contents);
  fs::rename(scratch, run_dir);
}

json read_config(const fs::path& file) {
  try {
    return json::parse(slurp(file));
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

int test_index(const Corpus& corpus, const std::string& name) {
  if (const auto t = corpus.index_of(name)) return *t;
  throw ConfigError("unknown distribution: " + name);
}

struct Prepared {
  fs::path run_dir;
  std::string dataset;
  bool exists = false;
};

Prepared prepare(const std::string& kind, const json& resolved, const fs::path& data_dir, const fs::path& out_root) {
  Prepared p;
  try {
    p.dataset = dataset_id(data_dir);
  } catch (const std::runtime_error& e) {
    throw ConfigError("no normalized dataset at " + data_dir.string() + ": " + e.what());
  }
  p.run_dir = out_root / (kind + "-" + run_id(kind, resolved, p.dataset));
  p.exists = fs::exists(p.run_dir / "report.json");
  return p;
}

/// Shared error mapping for the pipeline commands.
template <typename Body>
int guarded(Console io, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InsufficientHistory& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const UntrainedModelError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const RangeError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

template <typename Run>
int run_pipeline(const std::string& kind, const json& resolved, const fs::path& data_dir, const fs::path& out_root,
                 Console io, Run&& run) {
  const Prepared p = prepare(kind, resolved, data_dir, out_root);
  if (p.exists) {
    io.out << p.run_dir.string() << " (existing run, not modified)\n";
    return kExitOk;
  }
  const Dataset ds = load_normalized(data_dir);
  auto [files, line] = run(ds.corpus, p.dataset);
  publish(p.run_dir, files);
  io.out << p.run_dir.string() << '\n' << line << '\n';
  return kExitOk;
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string dataset_id(const fs::path& data_dir) { return hex16(fnv1a64(slurp(data_dir / "manifest.json"))); }

std::string run_id(const std::string& kind, const json& resolved, const std::string& dataset) {
  return hex16(fnv1a64(kind + "\n" + resolved.dump() + "\n" + dataset));
}

int cmd_ingest(const fs::path& raw_dir, const fs::path& out_dir, Console io) {
  Dataset ds;
  try {
    ds = ingest_raw(raw_dir);
  } catch (const MissingInputError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    write_normalized(out_dir, ds);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::size_t packages = 0;
  for (const auto& s : ds.corpus.snapshots()) packages += s.package_count();
  io.out << "ingested " << ds.corpus.size() << " distributions, " << packages << " package snapshots into "
         << out_dir.string() << '\n';
  const std::size_t errors = ds.total_parse_errors();
  if (errors > 0) {
    io.err << errors << " parse errors; see manifest.json\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(ds.issues.size(), 20); ++i)
      io.err << "  " << ds.issues[i].origin << ':' << ds.issues[i].line << ": " << ds.issues[i].message << '\n';
    return kExitData;
  }
  return kExitOk;
}

int cmd_synth(const SynthConfig& config, const fs::path& out_dir, Console io) {
  if (config.releases < 8 || config.packages < 20) {
    io.err << "error: synth needs at least 8 releases and 20 packages\n";
    return kExitUsage;
  }
  try {
    write_normalized(out_dir, synthesize(config));
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  io.out << "wrote synthetic corpus (" << config.releases << " releases, " << config.packages << " packages) to "
         << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_urgency(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_root,
                std::optional<std::uint64_t> seed, Console io) {
  return guarded(io, [&] {
    const UrgencyJob job = parse_urgency_job(read_config(config_file), seed);
    const json resolved = to_json(job);
    return run_pipeline("urgency", resolved, data_dir, out_root, io, [&](const Corpus& corpus, const std::string& id) {
      const UrgencyRun run = run_urgency(corpus, test_index(corpus, job.test), job.config);
      std::string line = "rho=" + fmt(run.rho) + " tau=" + fmt(run.tau) + " rho@k=" + fmt(run.rho_at_k) +
                         " tau@k=" + fmt(run.tau_at_k) + " packages=" + std::to_string(run.packages.size());
      return std::pair{urgency_report(corpus, run, resolved, id), line};
    });
  });
}

int cmd_devrec(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_root,
               std::optional<std::uint64_t> seed, Console io) {
  return guarded(io, [&] {
    const DevrecJob job = parse_devrec_job(read_config(config_file), seed);
    const json resolved = to_json(job);
    return run_pipeline("devrec", resolved, data_dir, out_root, io, [&](const Corpus& corpus, const std::string& id) {
      const DevrecRun run = run_devrec(corpus, test_index(corpus, job.test), job.config);
      std::string line = "mrr=" + fmt(run.summary.mrr) + " coverage=" + fmt(run.summary.coverage) +
                         " queries=" + std::to_string(run.summary.queries);
      return std::pair{devrec_report(run, resolved, id), line};
    });
  });
}

int cmd_baseline(const fs::path& data_dir, const fs::path& config_file, const fs::path& out_root,
                 std::optional<std::uint64_t> seed, Console io) {
  return guarded(io, [&] {
    const BaselineJob job = parse_baseline_job(read_config(config_file), seed);
    const json resolved = to_json(job);
    return run_pipeline("baseline", resolved, data_dir, out_root, io, [&](const Corpus& corpus, const std::string& id) {
      const int T = test_index(corpus, job.test);
      BaselineRun run;
      std::vector<std::pair<double, double>> sweep;
      if (job.method == "upper_bound") {
        run = run_upper_bound(corpus, T, job.policy, job.window);
      } else if (job.method == "majority") {
        run = run_majority(corpus, T, job.policy, job.window, job.k_maj);
      } else if (job.p_corr) {
        run = run_seq_of_sets(corpus, T, *job.p_corr, job.seed, job.seq);
        sweep.emplace_back(*job.p_corr, run.summary.mrr);
      } else {
        auto s = sweep_seq_of_sets(corpus, T, job.seed, job.seq);
        run = std::move(s.best);
        sweep = std::move(s.table);
      }
      std::string line = job.method + " mrr=" + fmt(run.summary.mrr) + " coverage=" + fmt(run.summary.coverage) +
                         " queries=" + std::to_string(run.summary.queries);
      return std::pair{baseline_report(run, sweep, resolved, id), line};
    });
  });
}

int cmd_eval(const fs::path& run_a, const fs::path& run_b, const std::optional<fs::path>& out_file, Console io) {
  json a, b;
  try {
    a = json::parse(slurp(run_a / "report.json"));
    b = json::parse(slurp(run_b / "report.json"));
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  json cmp;
  try {
    cmp = compare_reports(a, b);
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  cmp["a"]["run"] = run_a.filename().string();
  cmp["b"]["run"] = run_b.filename().string();
  const std::string text = cmp.dump(2) + "\n";
  if (out_file) {
    try {
      write_file(*out_file, text);
    } catch (const std::exception& e) {
      io.err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  } else {
    io.out << text;
  }
  return kExitOk;
}

}  // namespace pkgpulse::cli
