// qdcascade: simulate a quantum-dot XX->X photon-pair cascade and run the
// coincidence / tomography analysis chain on the resulting event streams.
//
// Subcommands: simulate, analyze, tomo, report. See README.md.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdcascade/analysis.hpp"
#include "qdcascade/cascade.hpp"
#include "qdcascade/density.hpp"
#include "qdcascade/events.hpp"
#include "qdcascade/histogram.hpp"
#include "qdcascade/polarization.hpp"
#include "qdcascade/simulate.hpp"
#include "qdcascade/tomography.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- small utilities ------------------------------------------------------

void write_file_atomic(const fs::path& p, const std::string& content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
  }
  fs::rename(tmp, p);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

// A projection setting given either as two analyzer letters ("LR") or as
// polar angles in the RL-HV plane ("0:45", degrees, XX first).
struct SettingSpec {
  std::string token;
  bool is_letters = false;
  char letter_xx = 0, letter_x = 0;
  double theta_xx = 0.0, theta_x = 0.0;

  qdc::MeasurementSetting setting() const {
    if (is_letters)
      return {qdc::basis_state(qdc::basis_from_char(letter_xx)),
              qdc::basis_state(qdc::basis_from_char(letter_x))};
    return {qdc::state_from_angles({theta_xx, 0.0}), qdc::state_from_angles({theta_x, 0.0})};
  }

  std::string file_tag() const {
    if (is_letters) return std::string{letter_xx, letter_x};
    auto fmt = [](double d) {
      std::ostringstream s;
      s << d;
      std::string t = s.str();
      std::replace(t.begin(), t.end(), '.', 'p');
      std::replace(t.begin(), t.end(), '-', 'm');
      return t;
    };
    return "a" + fmt(theta_xx) + "_x" + fmt(theta_x);
  }
};

SettingSpec parse_setting(const std::string& token) {
  SettingSpec s;
  s.token = token;
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    if (token.size() != 2)
      throw std::runtime_error("bad setting '" + token + "': expected two letters or thetaXX:thetaX");
    s.is_letters = true;
    s.letter_xx = token[0];
    s.letter_x = token[1];
    qdc::basis_from_char(s.letter_xx);  // validate
    qdc::basis_from_char(s.letter_x);
    return s;
  }
  try {
    s.theta_xx = std::stod(token.substr(0, colon));
    s.theta_x = std::stod(token.substr(colon + 1));
  } catch (...) {
    throw std::runtime_error("bad setting '" + token + "': angles must be numeric");
  }
  return s;
}

const std::vector<std::string> kDefaultSettings = {"LR", "LL", "RR", "RL", "HH", "HV",
                                                   "VH", "VV", "DD", "DA", "AD", "AA"};

std::vector<std::string> chsh_setting_tokens() {
  std::vector<std::string> out;
  for (int a : {0, 90, 180, 270})
    for (int b : {45, 135, 225, 315})
      out.push_back(std::to_string(a) + ":" + std::to_string(b));
  return out;
}

// Source override requested on the command line: "bell", "werner:V" or
// "visibilities:C_circ,C_hv,C_da".
std::optional<qdc::DensityMatrix4> parse_override(const std::string& spec) {
  if (spec.empty()) return {};
  if (spec == "bell") return qdc::bell_psi();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "werner") return qdc::werner(std::stod(args));
  if (kind == "visibilities") {
    const auto v = split_csv(args);
    if (v.size() != 3) throw std::runtime_error("visibilities override needs three values");
    return qdc::bell_diagonal_from_visibilities(std::stod(v[0]), std::stod(v[1]), std::stod(v[2]));
  }
  throw std::runtime_error("unknown source override '" + spec + "'");
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---- run configuration ----------------------------------------------------

struct RunConfig {
  qdc::CascadeParams params;
  double duration_s = 0.01;
  std::vector<std::string> settings = kDefaultSettings;
  std::int64_t bin_ps = 128;
  double window_ns = 60.0;
  int side_peaks = 10;
  double tomo_tol = 1e-10;
  int tomo_max_iter = 100000;

  void apply_kv(const qdc::KvMap& kv) {
    static const std::set<std::string> known = {
        "gamma1_per_ns", "gamma_xx_per_ns", "gamma_s_per_ns", "fss_uev", "rep_rate_mhz",
        "p_exc", "det_eff0", "det_eff1", "det_eff2", "jitter_ps", "dark_cps0", "dark_cps1",
        "dark_cps2", "duration_s", "settings", "bin_ps", "window_ns", "side_peaks",
        "tomo_tol", "tomo_max_iter"};
    for (const auto& [k, v] : kv)
      if (!known.contains(k)) throw std::runtime_error("config: unknown key '" + k + "'");
    qdc::apply_params_kv(kv, params);
    if (auto it = kv.find("duration_s"); it != kv.end()) duration_s = std::stod(it->second);
    if (auto it = kv.find("settings"); it != kv.end()) settings = split_csv(it->second);
    if (auto it = kv.find("bin_ps"); it != kv.end()) bin_ps = std::stoll(it->second);
    if (auto it = kv.find("window_ns"); it != kv.end()) window_ns = std::stod(it->second);
    if (auto it = kv.find("side_peaks"); it != kv.end()) side_peaks = std::stoi(it->second);
    if (auto it = kv.find("tomo_tol"); it != kv.end()) tomo_tol = std::stod(it->second);
    if (auto it = kv.find("tomo_max_iter"); it != kv.end()) tomo_max_iter = std::stoi(it->second);
  }
};

json params_to_json(const qdc::CascadeParams& p) {
  json j;
  j["gamma1_per_ns"] = p.gamma1_per_ns;
  j["gamma_xx_per_ns"] = p.gamma_xx_per_ns;
  j["gamma_s_per_ns"] = p.gamma_s_per_ns;
  j["fss_uev"] = p.fss_uev;
  j["rep_rate_mhz"] = p.rep_rate_mhz;
  j["p_exc"] = p.p_exc;
  j["det_eff"] = p.det_eff;
  j["jitter_ps"] = p.jitter_ps;
  j["dark_cps"] = p.dark_cps;
  return j;
}

qdc::CascadeParams params_from_json(const json& j) {
  qdc::CascadeParams p;
  p.gamma1_per_ns = j.at("gamma1_per_ns");
  p.gamma_xx_per_ns = j.at("gamma_xx_per_ns");
  p.gamma_s_per_ns = j.at("gamma_s_per_ns");
  p.fss_uev = j.at("fss_uev");
  p.rep_rate_mhz = j.at("rep_rate_mhz");
  p.p_exc = j.at("p_exc");
  p.det_eff = j.at("det_eff");
  p.jitter_ps = j.at("jitter_ps");
  p.dark_cps = j.at("dark_cps");
  return p;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::string settings_csv;
  bool chsh = false;
  std::string override_spec;
};

int cmd_simulate(const SimulateArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) cfg.apply_kv(qdc::load_kv(a.config_path));
  if (a.duration_s) cfg.duration_s = *a.duration_s;
  if (!a.settings_csv.empty()) cfg.settings = split_csv(a.settings_csv);
  if (a.chsh) cfg.settings = chsh_setting_tokens();
  cfg.params.validate();
  const std::uint64_t seed = ensure_seed(a.seed);
  const auto override_state = parse_override(a.override_spec);

  fs::create_directories(a.out_dir);
  json manifest;
  manifest["command"] = "simulate";
  manifest["params"] = params_to_json(cfg.params);
  manifest["duration_s"] = cfg.duration_s;
  manifest["seed"] = seed;
  if (!a.override_spec.empty()) manifest["source_override"] = a.override_spec;

  // One derived seed per setting so adding a setting never reshuffles the
  // others; the per-setting runs are independent and fan out to a pool.
  std::vector<SettingSpec> specs;
  for (const std::string& token : cfg.settings) specs.push_back(parse_setting(token));
  std::vector<std::future<std::array<qdc::EventStream, 3>>> jobs;
  for (std::size_t i = 0; i < specs.size(); ++i)
    jobs.push_back(std::async(std::launch::async, [&, i] {
      return qdc::simulate(cfg.params, specs[i].setting(), cfg.duration_s,
                           seed + 0x9e3779b97f4a7c15ULL * (i + 1), override_state);
    }));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const fs::path file = fs::path(a.out_dir) / ("streams_" + specs[i].file_tag() + ".tsv");
    const fs::path tmp = file.string() + ".tmp";
    qdc::save_streams(tmp, jobs[i].get());
    fs::rename(tmp, file);
    manifest["runs"].push_back({{"setting", cfg.settings[i]}, {"file", file.filename().string()}});
  }
  write_file_atomic(fs::path(a.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "simulated " << cfg.settings.size() << " settings -> " << a.out_dir << "\n";
  return 0;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  std::string in_dir;
  std::string out_dir = "analysis";
  std::int64_t bin_ps = 128;
  double window_ns = 60.0;
  int side_peaks = 10;
};

struct RunData {
  SettingSpec spec;
  qdc::PeakAreas areas01, areas02;  // XX vs co-port / cross-port
  qdc::CorrelationSettingResult result;
};

std::string hist_csv(const qdc::Histogram& h) {
  std::ostringstream s;
  s << "delay_ps,counts\n";
  for (std::int64_t i = 0; i < h.n_bins(); ++i)
    s << h.bin_center(i) << ',' << h.counts[static_cast<std::size_t>(i)] << '\n';
  return s.str();
}

int cmd_analyze(const AnalyzeArgs& a) {
  const fs::path in(a.in_dir);
  std::ifstream mf(in / "manifest.json");
  if (!mf) throw std::runtime_error("no manifest.json in " + a.in_dir);
  json manifest = json::parse(mf);
  const qdc::CascadeParams params = params_from_json(manifest.at("params"));

  const std::int64_t period_ps = std::llround(params.period_ps());
  // Display histograms use the requested bin; peak integration needs bins
  // commensurate with the pulse period, so pick the largest divisor <= bin.
  std::int64_t int_bin = std::min<std::int64_t>(a.bin_ps, period_ps);
  while (period_ps % int_bin != 0) --int_bin;
  auto commensurate_window = [&](std::int64_t bin) {
    return (static_cast<std::int64_t>(a.window_ns * 1000.0) / (2 * bin)) * (2 * bin);
  };
  const std::int64_t disp_window = commensurate_window(a.bin_ps);
  const std::int64_t int_window = commensurate_window(int_bin);

  fs::create_directories(a.out_dir);
  std::vector<RunData> runs;
  for (const auto& run : manifest.at("runs")) {
    RunData rd;
    rd.spec = parse_setting(run.at("setting").get<std::string>());
    const auto streams = qdc::load_streams3(in / run.at("file").get<std::string>());

    for (int ch : {1, 2}) {
      const auto display =
          qdc::cross_correlate(streams[0], streams[static_cast<std::size_t>(ch)], a.bin_ps, disp_window);
      write_file_atomic(fs::path(a.out_dir) /
                            ("hist_" + rd.spec.file_tag() + "_c0" + std::to_string(ch) + ".csv"),
                        hist_csv(display));
      const auto integ =
          qdc::cross_correlate(streams[0], streams[static_cast<std::size_t>(ch)], int_bin, int_window);
      (ch == 1 ? rd.areas01 : rd.areas02) = qdc::integrate_areas(integ, period_ps, a.side_peaks);
    }
    rd.result.setting = rd.spec.token;
    rd.result.n_parallel = qdc::normalize(rd.areas01);
    rd.result.n_perp = qdc::normalize(rd.areas02);
    runs.push_back(rd);
  }

  json out;
  out["input"] = fs::absolute(in).string();
  out["seed"] = manifest.at("seed");
  out["params"] = manifest.at("params");
  out["bin_ps"] = a.bin_ps;
  out["integration_bin_ps"] = int_bin;
  out["side_peaks"] = a.side_peaks;
  std::ostringstream text;

  for (const RunData& rd : runs) {
    json jr;
    jr["setting"] = rd.spec.token;
    jr["n_parallel"] = rd.result.n_parallel.n;
    jr["n_parallel_sigma"] = rd.result.n_parallel.poisson_sigma;
    jr["n_perp"] = rd.result.n_perp.n;
    jr["n_perp_sigma"] = rd.result.n_perp.poisson_sigma;
    out["runs"].push_back(jr);
    text << "n[" << rd.spec.token << "] = " << rd.result.n_parallel.n << " +- " << rd.result.n_parallel.poisson_sigma
         << " / " << rd.result.n_perp.n << " +- " << rd.result.n_perp.poisson_sigma << "\n";
  }

  // Per-basis visibilities from the three-detector scheme: co- and
  // cross-polarized numbers come from the same run, so pump fluctuations
  // cancel. Runs of the same basis pair are pooled before normalizing.
  struct BasisDef {
    const char* name;
    char plus, minus;
  };
  constexpr BasisDef kBasisDefs[] = {
      {"circular", 'R', 'L'}, {"rectilinear", 'H', 'V'}, {"diagonal", 'D', 'A'}};
  std::map<std::string, double> vis, vis_sigma;
  for (const BasisDef& def : kBasisDefs) {
    qdc::PeakAreas co, cross;
    bool any = false;
    for (const RunData& rd : runs) {
      if (!rd.spec.is_letters) continue;
      const bool xx_in = rd.spec.letter_xx == def.plus || rd.spec.letter_xx == def.minus;
      const bool x_in = rd.spec.letter_x == def.plus || rd.spec.letter_x == def.minus;
      if (!xx_in || !x_in) continue;
      any = true;
      // Same-letter outcome is co-polarized; port 2 carries the complement.
      if (rd.spec.letter_xx == rd.spec.letter_x) {
        co += rd.areas01;
        cross += rd.areas02;
      } else {
        cross += rd.areas01;
        co += rd.areas02;
      }
    }
    if (!any) continue;
    const auto n_co = qdc::normalize(co);
    const auto n_cross = qdc::normalize(cross);
    vis[def.name] = qdc::visibility(n_co.n, n_cross.n);
    vis_sigma[def.name] = qdc::visibility_sigma(n_co, n_cross);
    out["visibility"][def.name] = vis[def.name];
    out["visibility_sigma"][def.name] = vis_sigma[def.name];
    text << "C[" << def.name << "] = " << vis[def.name] << " +- " << vis_sigma[def.name] << "\n";
  }
  if (vis.size() == 3) {
    const double f =
        qdc::fidelity_from_visibilities(vis["circular"], vis["rectilinear"], vis["diagonal"]);
    const double fs = 0.25 * std::sqrt(vis_sigma["circular"] * vis_sigma["circular"] +
                                       vis_sigma["rectilinear"] * vis_sigma["rectilinear"] +
                                       vis_sigma["diagonal"] * vis_sigma["diagonal"]);
    out["fidelity"] = f;
    out["fidelity_sigma"] = fs;
    text << "f = " << f << " +- " << fs << "\n";
  }

  // CHSH when the 16 standard angle settings are present. Outcome (x, y)
  // pools run (x, y) port 1 with run (x, y+180) port 2.
  {
    std::map<std::pair<int, int>, const RunData*> by_angle;
    for (const RunData& rd : runs)
      if (!rd.spec.is_letters)
        by_angle[{static_cast<int>(std::lround(rd.spec.theta_xx)) % 360,
                  static_cast<int>(std::lround(rd.spec.theta_x)) % 360}] = &rd;
    bool have_all = true;
    for (int x : {0, 90, 180, 270})
      for (int y : {45, 135, 225, 315})
        if (!by_angle.contains({x, y})) have_all = false;

    if (have_all) {
      auto outcome = [&](int x, int y) {
        qdc::PeakAreas pooled;
        pooled += by_angle.at({x % 360, y % 360})->areas01;
        pooled += by_angle.at({x % 360, (y + 180) % 360})->areas02;
        return qdc::normalize(pooled);
      };
      auto correlation = [&](int x, int y) {
        const std::array<qdc::NormalizedCoincidence, 4> n = {
            outcome(x, y), outcome(x, y + 180), outcome(x + 180, y), outcome(x + 180, y + 180)};
        return std::pair{qdc::correlation_E(n), qdc::correlation_E_sigma(n)};
      };
      // Slots (a,b), (a,b'), (a',b), (a',b') with a=0, a'=90, b=135, b'=45.
      const auto e1 = correlation(0, 135);
      const auto e2 = correlation(0, 45);
      const auto e3 = correlation(90, 135);
      const auto e4 = correlation(90, 45);
      const double s = qdc::chsh_s({e1.first, e2.first, e3.first, e4.first});
      const double sigma = std::sqrt(e1.second * e1.second + e2.second * e2.second +
                                     e3.second * e3.second + e4.second * e4.second);
      out["chsh"]["E"] = {e1.first, e2.first, e3.first, e4.first};
      out["chsh"]["S"] = s;
      out["chsh"]["S_sigma"] = sigma;
      text << "S = " << s << " +- " << sigma << "\n";
    }
  }

  // Interference fringes: angle runs grouped by the XX angle.
  {
    std::map<double, std::vector<const RunData*>> by_xx;
    for (const RunData& rd : runs)
      if (!rd.spec.is_letters) by_xx[rd.spec.theta_xx].push_back(&rd);
    for (auto& [theta_xx, group] : by_xx) {
      std::set<double> distinct;
      for (const RunData* rd : group) distinct.insert(rd->spec.theta_x);
      if (distinct.size() < 4) continue;
      std::sort(group.begin(), group.end(), [](const RunData* a, const RunData* b) {
        return a->spec.theta_x < b->spec.theta_x;
      });
      std::vector<double> th, nn;
      std::ostringstream csv;
      csv << "theta_deg,n,sigma\n";
      for (const RunData* rd : group) {
        th.push_back(rd->spec.theta_x);
        nn.push_back(rd->result.n_parallel.n);
        csv << rd->spec.theta_x << ',' << rd->result.n_parallel.n << ',' << rd->result.n_parallel.poisson_sigma << '\n';
      }
      std::ostringstream name;
      name << "fringes_a" << theta_xx;
      write_file_atomic(fs::path(a.out_dir) / (name.str() + ".csv"), csv.str());
      const qdc::FringeFit fit = qdc::fit_fringe(th, nn);
      json jf;
      jf["theta_xx"] = theta_xx;
      jf["amplitude"] = fit.amplitude;
      jf["phase_deg"] = fit.phase_deg;
      jf["offset"] = fit.offset;
      jf["residual_rms"] = fit.residual_rms;
      out["fringes"].push_back(jf);
      text << "fringe[" << theta_xx << "]: amplitude=" << fit.amplitude
           << " phase_deg=" << fit.phase_deg << " offset=" << fit.offset << "\n";
    }
  }

  write_file_atomic(fs::path(a.out_dir) / "analysis.json", out.dump(2) + "\n");
  write_file_atomic(fs::path(a.out_dir) / "summary.txt", text.str());
  std::cout << text.str();
  return 0;
}

// ---- tomo ------------------------------------------------------------------

struct TomoArgs {
  std::string counts_path;
  std::string out_dir = "tomo";
  std::string synthetic;  // bell | werner:V | visibilities:a,b,c
  double shots = 1e6;
  bool exact = false;
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
  int max_iter = 100000;
  int bootstrap = 0;
};

json matrix_report(const qdc::DensityMatrix4& rho) {
  // Figure-style imaginary part: magnitudes plus a separate sign matrix.
  json j;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double im = rho(r, c).imag();
      j["im_abs"][r][c] = std::abs(im);
      j["im_sign"][r][c] = im > 0.0 ? 1 : (im < 0.0 ? -1 : 0);
    }
  return j;
}

int cmd_tomo(const TomoArgs& a) {
  fs::create_directories(a.out_dir);
  json manifest;
  manifest["command"] = "tomo";
  manifest["tol"] = a.tol;
  manifest["max_iter"] = a.max_iter;

  qdc::TomoCounts counts;
  if (!a.synthetic.empty()) {
    const auto state = parse_override(a.synthetic);
    const std::uint64_t seed = ensure_seed(a.seed);
    if (a.exact) {
      counts = qdc::TomoCounts::expected(*state, a.shots);
    } else {
      qdc::Rng rng(seed);
      counts = qdc::TomoCounts::sample_poisson(*state, a.shots, rng);
    }
    const fs::path csv = fs::path(a.out_dir) / "counts.csv";
    counts.save_csv(csv.string() + ".tmp");
    fs::rename(csv.string() + ".tmp", csv);
    manifest["synthetic"] = a.synthetic;
    manifest["shots"] = a.shots;
    manifest["exact"] = a.exact;
    manifest["seed"] = seed;
  } else {
    if (a.counts_path.empty()) throw std::runtime_error("tomo: need --counts or --synthetic");
    counts = qdc::TomoCounts::load_csv(a.counts_path);
    manifest["counts"] = fs::absolute(a.counts_path).string();
  }

  const qdc::MleResult res = qdc::mle_reconstruct(counts, {a.tol, a.max_iter});
  const qdc::StateSummary summary = qdc::summarize_state(res.rho);

  json extra = json::parse(qdc::summary_to_json(summary));
  extra["mle_objective"] = res.objective;
  extra["mle_evaluations"] = res.evaluations;
  extra.update(matrix_report(res.rho));

  if (a.bootstrap > 0) {
    const std::uint64_t seed = ensure_seed(a.seed) ^ 0xb005742eULL;
    // Resamples are independent reconstructions; run them concurrently.
    std::vector<std::future<qdc::StateSummary>> jobs;
    for (int b = 0; b < a.bootstrap; ++b)
      jobs.push_back(std::async(std::launch::async, [&, b] {
        qdc::Rng rng(seed + static_cast<std::uint64_t>(b));
        qdc::TomoCounts resampled;
        for (std::size_t i = 0; i < counts.counts.size(); ++i)
          resampled.counts[i] = rng.poisson(static_cast<double>(counts.counts[i]));
        return qdc::summarize_state(qdc::mle_reconstruct(resampled, {a.tol, a.max_iter}).rho);
      }));
    std::vector<qdc::StateSummary> boots;
    for (auto& job : jobs) boots.push_back(job.get());
    auto stddev = [&](auto field) {
      double m = 0.0, s = 0.0;
      for (const auto& b : boots) m += field(b) / boots.size();
      for (const auto& b : boots) s += (field(b) - m) * (field(b) - m);
      return std::sqrt(s / std::max<std::size_t>(1, boots.size() - 1));
    };
    extra["bootstrap_sigma"]["fidelity"] = stddev([](const auto& s) { return s.fidelity; });
    extra["bootstrap_sigma"]["tangle"] = stddev([](const auto& s) { return s.tangle; });
    extra["bootstrap_sigma"]["peres_min_eigenvalue"] =
        stddev([](const auto& s) { return s.peres_min; });
    extra["bootstrap_sigma"]["entanglement_of_formation"] =
        stddev([](const auto& s) { return s.eof; });
    manifest["bootstrap"] = a.bootstrap;
  }

  write_file_atomic(fs::path(a.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  const fs::path rho_path = fs::path(a.out_dir) / "rho.json";
  qdc::save_density(rho_path.string() + ".tmp", res.rho, extra.dump());
  fs::rename(rho_path.string() + ".tmp", rho_path);

  std::ostringstream text;
  text << "fidelity=" << summary.fidelity << "\n"
       << "chsh_s=" << summary.chsh << "\n"
       << "peres_min_eigenvalue=" << summary.peres_min << "\n"
       << "tangle=" << summary.tangle << "\n"
       << "linear_entropy=" << summary.linear_entropy << "\n"
       << "entanglement_of_formation=" << summary.eof << "\n";
  write_file_atomic(fs::path(a.out_dir) / "summary.txt", text.str());
  std::cout << text.str();
  return 0;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::string analysis_path;
  std::string tomo_path;
  std::string out_path = "report.json";
};

int cmd_report(const ReportArgs& a) {
  if (a.analysis_path.empty() && a.tomo_path.empty())
    throw std::runtime_error("report: need --analysis and/or --tomo inputs");
  json report;
  report["command"] = "report";
  std::ostringstream text;
  if (!a.analysis_path.empty()) {
    std::ifstream f(a.analysis_path);
    if (!f) throw std::runtime_error("cannot open " + a.analysis_path);
    const json an = json::parse(f);
    report["inputs"].push_back(fs::absolute(a.analysis_path).string());
    report["correlation"] = an;
    if (an.contains("fidelity"))
      text << "fidelity (from visibilities) = " << an.at("fidelity").get<double>() << "\n";
    if (an.contains("chsh")) text << "S = " << an.at("chsh").at("S").get<double>() << "\n";
  }
  if (!a.tomo_path.empty()) {
    std::ifstream f(a.tomo_path);
    if (!f) throw std::runtime_error("cannot open " + a.tomo_path);
    const json t = json::parse(f);
    report["inputs"].push_back(fs::absolute(a.tomo_path).string());
    report["tomography"] = t;
    if (t.contains("summary")) {
      const json& s = t.at("summary");
      text << "fidelity (tomography) = " << s.at("fidelity").get<double>() << "\n"
           << "tangle = " << s.at("tangle").get<double>() << "\n"
           << "linear_entropy = " << s.at("linear_entropy").get<double>() << "\n"
           << "entanglement_of_formation = " << s.at("entanglement_of_formation").get<double>()
           << "\n"
           << "peres_min_eigenvalue = " << s.at("peres_min_eigenvalue").get<double>() << "\n";
    }
  }
  write_file_atomic(a.out_path, report.dump(2) + "\n");
  std::cout << text.str() << "report -> " << a.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-dot cascade photon-pair simulator and analysis chain"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "generate three-channel event streams per setting");
  s->add_option("--config", sim.config_path, "key=value parameter file");
  s->add_option("--out", sim.out_dir, "output directory");
  s->add_option("--seed", sim.seed, "RNG seed (generated and recorded when absent)");
  s->add_option("--duration-s", sim.duration_s, "acquisition time per setting");
  s->add_option("--settings", sim.settings_csv, "comma list, e.g. LR,LL or 0:45 angle pairs");
  s->add_flag("--chsh", sim.chsh, "use the 16 standard Bell-test settings");
  s->add_option("--override", sim.override_spec,
                "replace the source state: bell | werner:V | visibilities:a,b,c");

  AnalyzeArgs an;
  auto* az = app.add_subcommand("analyze", "histograms, visibilities, fidelity, CHSH");
  az->add_option("--in", an.in_dir, "simulate output directory")->required();
  az->add_option("--out", an.out_dir, "output directory");
  az->add_option("--bin-ps", an.bin_ps, "histogram bin width [ps]");
  az->add_option("--window-ns", an.window_ns, "full correlation window [ns]");
  az->add_option("--side-peaks", an.side_peaks, "side peaks averaged for normalization");

  TomoArgs tm;
  auto* tz = app.add_subcommand("tomo", "maximum-likelihood state reconstruction");
  tz->add_option("--counts", tm.counts_path, "36-setting counts CSV");
  tz->add_option("--out", tm.out_dir, "output directory");
  tz->add_option("--synthetic", tm.synthetic, "generate counts from a model state instead");
  tz->add_option("--shots", tm.shots, "shots per setting for --synthetic");
  tz->add_flag("--exact", tm.exact, "expected counts instead of Poisson sampling");
  tz->add_option("--seed", tm.seed, "RNG seed for --synthetic");
  tz->add_option("--tol", tm.tol, "relative objective tolerance");
  tz->add_option("--max-iter", tm.max_iter, "objective evaluation budget");
  tz->add_option("--bootstrap", tm.bootstrap, "bootstrap resamples for error bars");

  ReportArgs rp;
  auto* rz = app.add_subcommand("report", "merge analysis and tomography outputs");
  rz->add_option("--analysis", rp.analysis_path, "analysis.json from analyze");
  rz->add_option("--tomo", rp.tomo_path, "rho.json from tomo");
  rz->add_option("--out", rp.out_path, "report file");

  try {
    app.parse(argc, argv);
    if (s->parsed()) return cmd_simulate(sim);
    if (az->parsed()) return cmd_analyze(an);
    if (tz->parsed()) return cmd_tomo(tm);
    if (rz->parsed()) return cmd_report(rp);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
