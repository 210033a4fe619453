#include "spinbath/run_config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "spinbath/rng.hpp"

namespace spinbath {

RunOptions RunConfig::run_options() const {
  RunOptions opt;
  opt.sample_every = sample_every;
  opt.threads = threads;
  opt.allow_large = allow_large;
  return opt;
}

MomentOptions RunConfig::moment_options() const {
  MomentOptions opt;
  opt.method = moment_method;
  opt.probes = moment_probes;
  opt.seed = mix_seed(model.seed, 0x30317);
  opt.max_stderr = moment_max_stderr;
  opt.threads = threads;
  return opt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view v, int line) {
  std::string buf(v);
  char* end = nullptr;
  const double x = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    throw ConfigError(line, "expected a number, got '" + buf + "'");
  return x;
}

long long parse_int(std::string_view v, int line) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(line, "expected an integer, got '" + std::string(v) + "'");
  return x;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  std::optional<double> pulse_width, omega_laser;
  std::set<std::string> seen;

  const std::map<std::string, int> int_keys = {
      {"n_s", 0},          {"n_eig", 1},        {"grid_n", 2},
      {"sample_every", 3}, {"threads", 4},      {"moment_probes", 5},
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const auto eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(line_no, "expected 'key = value', got '" + std::string(raw) + "'");
    const std::string key{trim(raw.substr(0, eq))};
    const std::string_view value = trim(raw.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");

    ModelConfig& m = cfg.model;
    if (key == "omega_eg") m.omega_eg = parse_double(value, line_no);
    else if (key == "omega_p") m.omega_p = parse_double(value, line_no);
    else if (key == "lambda0") m.lambda0 = parse_double(value, line_no);
    else if (key == "lambda") m.lambda = parse_double(value, line_no);
    else if (key == "beta") m.beta = parse_double(value, line_no);
    else if (key == "omega_c") m.omega_c = parse_double(value, line_no);
    else if (key == "kT") m.kT = parse_double(value, line_no);
    else if (key == "pulse_amplitude") m.pulse_amplitude = parse_double(value, line_no);
    else if (key == "pulse_width") pulse_width = parse_double(value, line_no);
    else if (key == "omega_laser") omega_laser = parse_double(value, line_no);
    else if (key == "t1") m.t1 = parse_double(value, line_no);
    else if (key == "t2") m.t2 = parse_double(value, line_no);
    else if (key == "t3") m.t3 = parse_double(value, line_no);
    else if (key == "t4") m.t4 = parse_double(value, line_no);
    else if (key == "tau_seq") m.tau_seq = parse_double(value, line_no);
    else if (key == "dt") m.dt = parse_double(value, line_no);
    else if (key == "t_end") m.t_end = parse_double(value, line_no);
    else if (key == "seed") m.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
    else if (key == "moment_max_stderr") cfg.moment_max_stderr = parse_double(value, line_no);
    else if (key == "moment_method") {
      if (value == "stochastic") cfg.moment_method = MomentMethod::stochastic;
      else if (value == "exact-basis") cfg.moment_method = MomentMethod::exact_basis;
      else throw ConfigError(line_no, "moment_method must be 'stochastic' or 'exact-basis'");
    } else if (key == "c_convention") {
      if (value == "centered") cfg.c_convention = CConvention::centered;
      else if (value == "raw") cfg.c_convention = CConvention::raw;
      else throw ConfigError(line_no, "c_convention must be 'centered' or 'raw'");
    } else if (auto it = int_keys.find(key); it != int_keys.end()) {
      const long long v = parse_int(value, line_no);
      switch (it->second) {
        case 0: m.n_s = static_cast<int>(v); break;
        case 1: m.n_eig = static_cast<int>(v); break;
        case 2: cfg.grid_n = static_cast<int>(v); break;
        case 3: cfg.sample_every = static_cast<int>(v); break;
        case 4: cfg.threads = static_cast<int>(v); break;
        case 5: cfg.moment_probes = static_cast<int>(v); break;
      }
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }

  if (pulse_width) cfg.model.pulse_width = *pulse_width;
  else cfg.model.pulse_width = 0.325 * cfg.model.pulse_amplitude * cfg.model.pulse_amplitude;
  if (omega_laser) cfg.model.omega_laser = *omega_laser;
  else cfg.model.omega_laser = cfg.model.omega_eg - cfg.model.omega_p;

  try {
    cfg.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line_no, e.what());
  }
  if (cfg.grid_n < 16) throw ConfigError(line_no, "grid_n must be >= 16");
  if (cfg.sample_every < 1) throw ConfigError(line_no, "sample_every must be >= 1");
  if (cfg.moment_probes < 2) throw ConfigError(line_no, "moment_probes must be >= 2");
  if (cfg.threads < 0) throw ConfigError(line_no, "threads must be >= 0");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<std::pair<std::string, std::string>> manifest_entries(
    const RunConfig& cfg, const std::string& engine) {
  const ModelConfig& m = cfg.model;
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("generator", std::string("spinbath ") + kVersion);
  out.emplace_back("engine", engine);
  out.emplace_back("omega_eg", format_double(m.omega_eg));
  out.emplace_back("omega_p", format_double(m.omega_p));
  out.emplace_back("lambda0", format_double(m.lambda0));
  out.emplace_back("lambda", format_double(m.lambda));
  out.emplace_back("beta", format_double(m.beta));
  out.emplace_back("omega_c", format_double(m.omega_c));
  out.emplace_back("kT", format_double(m.kT));
  out.emplace_back("pulse_amplitude", format_double(m.pulse_amplitude));
  out.emplace_back("pulse_width", format_double(m.pulse_width));
  out.emplace_back("omega_laser", format_double(m.omega_laser));
  out.emplace_back("t1", format_double(m.t1));
  out.emplace_back("t2", format_double(m.t2));
  out.emplace_back("t3", format_double(m.t3));
  out.emplace_back("t4", format_double(m.t4));
  out.emplace_back("tau_seq", format_double(m.tau_seq));
  out.emplace_back("dt", format_double(m.dt));
  out.emplace_back("t_end", format_double(m.t_end));
  out.emplace_back("n_s", std::to_string(m.n_s));
  out.emplace_back("n_eig", std::to_string(m.n_eig));
  out.emplace_back("seed", std::to_string(m.seed));
  out.emplace_back("grid_n", std::to_string(cfg.grid_n));
  out.emplace_back("moment_method", cfg.moment_method == MomentMethod::stochastic
                                        ? "stochastic"
                                        : "exact-basis");
  out.emplace_back("moment_probes", std::to_string(cfg.moment_probes));
  out.emplace_back("moment_max_stderr", format_double(cfg.moment_max_stderr));
  out.emplace_back("c_convention",
                   cfg.c_convention == CConvention::centered ? "centered" : "raw");
  out.emplace_back("sample_every", std::to_string(cfg.sample_every));
  return out;
}

}  // namespace spinbath
