#include "cdho/sweep.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "cdho/config.hpp"
#include "cdho/error.hpp"
#include "cdho/run.hpp"

namespace cdho {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

struct JobResult {
  bool ok = false;
  int status = 0;
  json headline;
  std::string error;
};

}  // namespace

SweepReport sweep(const json& base, const std::string& axis, const std::vector<json>& values, int jobs,
                  const fs::path& out) {
  if (values.empty()) throw Error(ErrorKind::Config, "sweep: the value list is empty");
  {
    const json defaults = default_config();
    const json* cur = &defaults;
    std::stringstream ss(axis);
    std::string part;
    while (std::getline(ss, part, '.')) {
      if (!cur->is_object() || !cur->contains(part))
        throw Error(ErrorKind::Config, "sweep: axis '" + axis + "' is not a config field");
      cur = &cur->at(part);
    }
    if (cur->is_object() || cur->is_array())
      throw Error(ErrorKind::Config, "sweep: axis '" + axis + "' is not a scalar field");
  }
  if (jobs < 1) throw Error(ErrorKind::Config, "sweep: --jobs must be >= 1");

  std::vector<JobResult> results(values.size());
  std::vector<RunConfig> configs(values.size());
  std::vector<bool> valid(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      json user = base;
      apply_override(user, axis + "=" + values[i].dump());
      configs[i] = resolve_config(user);
      valid[i] = true;
    } catch (const Error& e) {
      results[i].error = e.what();
    }
  }

  fs::create_directories(out);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      if (!valid[i]) continue;
      try {
        const RunReport r = run(configs[i], out / ("job_" + std::to_string(i)));
        results[i].status = r.status;
        results[i].headline = r.summary.value("headline", json::object());
        if (r.summary.contains("error"))
          results[i].error = r.summary["error"].get<std::string>();
        else
          results[i].ok = true;
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min<int>(jobs, static_cast<int>(values.size()));
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::set<std::string> keys;
  for (const auto& r : results)
    if (r.ok)
      for (const auto& [key, v] : r.headline.items()) keys.insert(key);

  SweepReport rep;
  std::ofstream csv(out / "sweep.csv");
  csv << axis << ",status";
  for (const auto& key : keys) csv << ',' << key;
  csv << '\n';
  json failures = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const JobResult& r = results[i];
    if (!r.ok) {
      rep.failures.push_back({values[i], r.error});
      failures.push_back({{"value", values[i]}, {"job", "job_" + std::to_string(i)}, {"error", r.error}});
      continue;
    }
    ++rep.succeeded;
    csv << cell(values[i]) << ',' << (r.status == 0 ? "ok" : "invariant_failed");
    for (const auto& key : keys) csv << ',' << (r.headline.contains(key) ? cell(r.headline.at(key)) : "");
    csv << '\n';
  }
  if (!csv) throw Error(ErrorKind::Io, "cannot write " + (out / "sweep.csv").string());
  std::ofstream(out / "failures.json") << failures.dump(2) << '\n';
  return rep;
}

}  // namespace cdho
