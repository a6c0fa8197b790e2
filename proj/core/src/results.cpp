#include "crx/results.hpp"

#include <chrono>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "crx/errors.hpp"

namespace crx::harness {

namespace {

constexpr const char* kVersion = "0.1.0";

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// Data lines of a CSV, skipping '#' comments and the header.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (header) *header = split(line, ',');
      have_header = true;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  return rows;
}

}  // namespace

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep,
                     const std::string& hash, bool averaged) {
  auto out = open_out(path);
  out << "# config_hash=" << hash << '\n';
  out << sweep.x_name << ",strategy," << (averaged ? "" : "seed,")
      << "mean_crb_db,min_sinr_db,feasibility_rate\n";
  for (const auto& r : averaged ? sweep.averaged() : sweep.rows) {
    out << r.x << ',' << to_string(r.strategy) << ',';
    if (!averaged) out << r.seed << ',';
    out << r.mean_crb_db << ',' << r.min_sinr_db << ',' << r.feasibility_rate << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
  std::vector<std::string> header;
  auto rows = read_rows(path, &header);
  if (header.size() != 6 || header[2] != "seed") {
    throw IoError(path.string() + " is not a per-seed sweep CSV");
  }
  SweepResult s;
  s.x_name = header[0];
  for (const auto& c : rows) {
    if (c.size() != 6) throw IoError("malformed row in " + path.string());
    s.rows.push_back({std::stod(c[0]), parse_strategy(c[1]), std::stoull(c[2]), std::stod(c[3]),
                      std::stod(c[4]), std::stod(c[5])});
  }
  return s;
}

void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRecord>& records,
                    const std::string& hash) {
  auto out = open_out(path);
  out << "# config_hash=" << hash << '\n';
  out << "strategy,seed,snr_db,region_lambda,mean_crb_db,min_sinr_db,feasibility_rate,"
         "mean_reward,sinr_db\n";
  for (const auto& r : records) {
    out << to_string(r.strategy) << ',' << r.seed << ',' << r.snr_db << ','
        << r.region_wavelengths << ',' << r.mean_crb_db << ',' << r.min_sinr_db << ','
        << r.feasibility_rate << ',' << r.mean_reward << ',';
    for (std::size_t k = 0; k < r.sinr_db.size(); ++k) out << (k ? ";" : "") << r.sinr_db[k];
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<EvalRecord> read_eval_csv(const std::filesystem::path& path) {
  std::vector<EvalRecord> out;
  for (const auto& c : read_rows(path, nullptr)) {
    if (c.size() != 9) throw IoError("malformed row in " + path.string());
    EvalRecord r;
    r.strategy = parse_strategy(c[0]);
    r.seed = std::stoull(c[1]);
    r.snr_db = std::stod(c[2]);
    r.region_wavelengths = std::stod(c[3]);
    r.mean_crb_db = std::stod(c[4]);
    r.min_sinr_db = std::stod(c[5]);
    r.feasibility_rate = std::stod(c[6]);
    r.mean_reward = std::stod(c[7]);
    for (const auto& v : split(c[8], ';')) r.sinr_db.push_back(std::stod(v));
    out.push_back(std::move(r));
  }
  return out;
}

void write_plot_data(const std::filesystem::path& path, const SweepResult& sweep) {
  auto avg = sweep.averaged();
  std::vector<Strategy> strategies;
  std::vector<double> xs;
  for (const auto& r : avg) {
    if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end())
      strategies.push_back(r.strategy);
    if (std::find(xs.begin(), xs.end(), r.x) == xs.end()) xs.push_back(r.x);
  }
  auto out = open_out(path);
  out << "# " << sweep.x_name;
  for (Strategy s : strategies) out << ' ' << to_string(s);
  out << '\n';
  for (double x : xs) {
    out << x;
    for (Strategy s : strategies) {
      auto it = std::find_if(avg.begin(), avg.end(),
                             [&](const SweepRow& r) { return r.x == x && r.strategy == s; });
      if (it == avg.end())
        out << " nan";
      else
        out << ' ' << it->mean_crb_db;
    }
    out << '\n';
  }
}

nlohmann::json manifest_json(const RunManifest& m) {
  return {{"tool", "crx_isac"},
          {"version", kVersion},
          {"command", m.command},
          {"profile", m.config.profile},
          {"config", m.config},
          {"config_hash", config_hash(m.config)},
          {"overrides", overrides(m.config)},
          {"seeds", m.config.seeds},
          {"wall_time_s", m.wall_time_s},
          {"files", m.files},
          {"reference_values",
           {{"note", "published full-scale region sweep anchors; not acceptance targets"},
            {"crb_db_at_7_5_lambda", -63.8},
            {"crb_db_at_20_lambda", -70.9}}}};
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest_json(m).dump(2) << '\n';
}

}  // namespace crx::harness
