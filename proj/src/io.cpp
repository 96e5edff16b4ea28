#include "sliceattrib/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sliceattrib {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f.precision(17);
  return f;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  return f;
}

// Reads a CSV with a header row and exactly `cols` numeric columns per row.
std::vector<std::vector<double>> read_csv(const fs::path& p, std::size_t cols) {
  std::ifstream f = open_in(p);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error("missing header row in " + p.string());
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != cols)
      throw std::runtime_error("bad column count in " + p.string());
    rows.push_back(std::move(row));
  }
  return rows;
}

json read_json(const fs::path& p) {
  std::ifstream f = open_in(p);
  json j;
  f >> j;
  return j;
}

}  // namespace

void save_window(const std::string& dir, const TelemetryWindow& w) {
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    std::ofstream f = open_out(base / "telemetry.csv");
    f << "t,slice,coord,value\n";
    for (std::size_t t = 0; t < w.horizon; ++t)
      for (std::size_t i = 0; i < w.n_slices; ++i)
        for (std::size_t c = 0; c < w.n_metrics; ++c)
          f << t << ',' << i << ',' << c << ',' << w.tele(t, i, c) << '\n';
  }
  {
    std::ofstream f = open_out(base / "allocation.csv");
    f << "t,slice,resource,value\n";
    for (std::size_t t = 0; t < w.horizon; ++t)
      for (std::size_t i = 0; i < w.n_slices; ++i)
        for (std::size_t k = 0; k < w.n_resources; ++k)
          f << t << ',' << i << ',' << k << ',' << w.alloc(t, i, k) << '\n';
  }
  {
    std::ofstream f = open_out(base / "utilization.csv");
    f << "t,resource,value\n";
    for (std::size_t t = 0; t < w.horizon; ++t)
      for (std::size_t k = 0; k < w.n_resources; ++k)
        f << t << ',' << k << ',' << w.util(t, k) << '\n';
  }
  {
    json meta{{"N", w.n_slices},
              {"K", w.n_resources},
              {"T", w.horizon},
              {"d", w.n_metrics},
              {"sample_period", w.sample_period}};
    std::ofstream f = open_out(base / "meta.json");
    f << meta.dump(2) << '\n';
  }
}

TelemetryWindow load_window(const std::string& dir) {
  const fs::path base(dir);
  if (!fs::is_directory(base))
    throw std::runtime_error("window directory not found: " + dir);
  const json meta = read_json(base / "meta.json");
  TelemetryWindow w = TelemetryWindow::zeros(
      meta.at("N").get<std::size_t>(), meta.at("K").get<std::size_t>(),
      meta.at("T").get<std::size_t>(), meta.at("d").get<std::size_t>(),
      meta.at("sample_period").get<double>());

  for (const auto& row : read_csv(base / "telemetry.csv", 4))
    w.tele(static_cast<std::size_t>(row[0]), static_cast<std::size_t>(row[1]),
           static_cast<std::size_t>(row[2])) = row[3];
  for (const auto& row : read_csv(base / "allocation.csv", 4))
    w.alloc(static_cast<std::size_t>(row[0]), static_cast<std::size_t>(row[1]),
            static_cast<std::size_t>(row[2])) = row[3];
  for (const auto& row : read_csv(base / "utilization.csv", 3))
    w.util(static_cast<std::size_t>(row[0]),
           static_cast<std::size_t>(row[1])) = row[2];
  return w;
}

std::string scenario_config_to_json(const ScenarioConfig& cfg) {
  json j{{"n_slices", cfg.n_slices},
         {"n_resources", cfg.n_resources},
         {"horizon", cfg.horizon},
         {"lags", cfg.lags},
         {"ar_root_multiplicity", cfg.ar_root_multiplicity},
         {"spectral_radius", cfg.spectral_radius},
         {"innovation_kurtosis", cfg.innovation_kurtosis},
         {"longrun_ratio", cfg.longrun_ratio},
         {"obs_noise_scale", cfg.obs_noise_scale},
         {"confounder_loading", cfg.confounder_loading},
         {"allocation_noise_sigma", cfg.allocation_noise_sigma},
         {"seed", cfg.seed},
         {"sample_period", cfg.sample_period},
         {"utilization_ar", cfg.utilization_ar},
         {"utilization_noise", cfg.utilization_noise},
         {"hot_load", cfg.hot_load},
         {"cold_load", cfg.cold_load},
         {"normalize_latent", cfg.normalize_latent}};
  if (!cfg.allocation_shares.empty())
    j["allocation_shares"] = cfg.allocation_shares;
  j["confounder_pairs"] = json::array();
  for (const auto& cp : cfg.confounder_pairs)
    j["confounder_pairs"].push_back(
        {{"i", cp.slice_i}, {"j", cp.slice_j}, {"resource", cp.resource}});
  j["attack_path"] = json::array();
  for (const auto& hop : cfg.attack_path)
    j["attack_path"].push_back({{"slice", hop.slice},
                                {"onset", hop.onset},
                                {"lag", hop.lag},
                                {"coefficient", hop.coefficient}});
  j["cross_couplings"] = json::array();
  for (const auto& cc : cfg.cross_couplings)
    j["cross_couplings"].push_back({{"source", cc.source},
                                    {"target", cc.target},
                                    {"lag", cc.lag},
                                    {"coefficient", cc.coefficient},
                                    {"onset", cc.onset}});
  j["regime_changes"] = json::array();
  for (const auto& rc : cfg.regime_changes) {
    json entry{{"time", rc.time}, {"magnitude", rc.magnitude}};
    if (rc.slice != RegimeChange::kAllSlices) entry["slice"] = rc.slice;
    j["regime_changes"].push_back(entry);
  }
  return j.dump(2);
}

ScenarioConfig scenario_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ScenarioConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("n_slices", cfg.n_slices);
  get("n_resources", cfg.n_resources);
  get("horizon", cfg.horizon);
  get("lags", cfg.lags);
  get("ar_root_multiplicity", cfg.ar_root_multiplicity);
  get("spectral_radius", cfg.spectral_radius);
  get("innovation_kurtosis", cfg.innovation_kurtosis);
  get("longrun_ratio", cfg.longrun_ratio);
  get("obs_noise_scale", cfg.obs_noise_scale);
  get("confounder_loading", cfg.confounder_loading);
  get("allocation_noise_sigma", cfg.allocation_noise_sigma);
  get("seed", cfg.seed);
  get("sample_period", cfg.sample_period);
  get("utilization_ar", cfg.utilization_ar);
  get("utilization_noise", cfg.utilization_noise);
  get("hot_load", cfg.hot_load);
  get("cold_load", cfg.cold_load);
  get("normalize_latent", cfg.normalize_latent);
  if (j.contains("allocation_shares"))
    cfg.allocation_shares = j.at("allocation_shares").get<std::vector<double>>();
  if (j.contains("confounder_pairs"))
    for (const auto& cp : j.at("confounder_pairs"))
      cfg.confounder_pairs.push_back({cp.at("i").get<std::size_t>(),
                                      cp.at("j").get<std::size_t>(),
                                      cp.at("resource").get<std::size_t>()});
  if (j.contains("attack_path"))
    for (const auto& hop : j.at("attack_path"))
      cfg.attack_path.push_back({hop.at("slice").get<std::size_t>(),
                                 hop.at("onset").get<std::size_t>(),
                                 hop.at("lag").get<std::size_t>(),
                                 hop.at("coefficient").get<double>()});
  if (j.contains("cross_couplings"))
    for (const auto& cc : j.at("cross_couplings"))
      cfg.cross_couplings.push_back({cc.at("source").get<std::size_t>(),
                                     cc.at("target").get<std::size_t>(),
                                     cc.at("lag").get<std::size_t>(),
                                     cc.at("coefficient").get<double>(),
                                     cc.at("onset").get<std::size_t>()});
  if (j.contains("regime_changes"))
    for (const auto& rc : j.at("regime_changes")) {
      RegimeChange change{rc.at("time").get<std::size_t>(),
                          rc.at("magnitude").get<double>()};
      if (rc.contains("slice")) change.slice = rc.at("slice").get<std::size_t>();
      cfg.regime_changes.push_back(change);
    }
  return cfg;
}

void save_scenario(const std::string& dir, const Scenario& sc) {
  save_window(dir, sc.window);
  const fs::path base(dir);
  {
    json truth;
    truth["hops"] = json::array();
    for (const auto& hop : sc.truth_path.hops)
      truth["hops"].push_back({{"slice", hop.slice}, {"time", hop.time}});
    truth["changepoints"] = sc.truth_changepoints;
    std::ofstream f = open_out(base / "truth.json");
    f << truth.dump(2) << '\n';
  }
  {
    std::ofstream f = open_out(base / "config.json");
    f << scenario_config_to_json(sc.config) << '\n';
  }
}

Scenario load_scenario(const std::string& dir) {
  Scenario sc;
  sc.window = load_window(dir);
  const fs::path base(dir);
  const json truth = read_json(base / "truth.json");
  for (const auto& hop : truth.at("hops"))
    sc.truth_path.hops.push_back({hop.at("slice").get<std::size_t>(),
                                  hop.at("time").get<std::size_t>(), 1.0, 0.0,
                                  0.0});
  sc.truth_changepoints =
      truth.at("changepoints").get<std::vector<std::size_t>>();
  if (fs::exists(base / "config.json")) {
    std::ifstream f = open_in(base / "config.json");
    std::stringstream ss;
    ss << f.rdbuf();
    sc.config = scenario_config_from_json(ss.str());
  }
  return sc;
}

std::string report_to_json(const AttributionReport& rep) {
  json j;
  j["edges"] = json::array();
  auto result_json = [](const PairTestResult& r) {
    return json{{"source", r.source},       {"target", r.target},
                {"segment", r.segment},     {"f_tilde", r.f_tilde},
                {"p_value", r.p_value},     {"p_adjusted", r.p_adjusted},
                {"rho", r.rho},             {"gamma", r.gamma},
                {"accepted", r.accepted}};
  };
  for (const auto& e : rep.graph.edges) j["edges"].push_back(result_json(e));
  j["all_results"] = json::array();
  for (const auto& r : rep.all_results) j["all_results"].push_back(result_json(r));

  j["path"]["product_score"] = rep.path.product_score;
  j["path"]["hops"] = json::array();
  for (const auto& hop : rep.path.hops)
    j["path"]["hops"].push_back({{"slice", hop.slice},
                                 {"time", hop.time},
                                 {"gamma", hop.gamma},
                                 {"p_adjusted", hop.p_adjusted},
                                 {"gamma_margin", hop.gamma_margin}});

  j["segments"] = json::array();
  for (const auto& sv : rep.segments)
    j["segments"].push_back({{"start", sv.segment.start},
                             {"end", sv.segment.end},
                             {"validity_bound", sv.bound}});
  j["warnings"] = rep.warnings;
  j["ks_bound_corrected"] = rep.ks_bound_corrected;
  j["ks_bound_iid"] = rep.ks_bound_iid;
  j["gamma_margin"] = rep.gamma_margin;
  return j.dump(2);
}

void save_report(const std::string& path, const AttributionReport& rep) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f = open_out(p);
  f << report_to_json(rep) << '\n';
}

}  // namespace sliceattrib
