#include "mec/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mec/rng.hpp"

namespace mec {

namespace rng {

double exponential1(std::mt19937_64& g) { return -std::log1p(-uniform01(g)); }

}  // namespace rng

ChannelGains::ChannelGains(std::size_t users, std::size_t subcarriers, std::size_t servers)
    : users_(users),
      subcarriers_(subcarriers),
      servers_(servers),
      values_(users * subcarriers * servers, 0.0) {}

ChannelGains::ChannelGains(std::size_t users, std::size_t subcarriers, std::size_t servers,
                           std::vector<double> values)
    : users_(users), subcarriers_(subcarriers), servers_(servers), values_(std::move(values)) {
  if (values_.size() != users * subcarriers * servers) {
    throw ScenarioError("gains.values: expected " + std::to_string(users * subcarriers * servers) +
                        " entries, got " + std::to_string(values_.size()));
  }
}

namespace {

bool same(const Point& a, const Point& b) { return a.x_m == b.x_m && a.y_m == b.y_m; }

bool same(const UserDevice& a, const UserDevice& b) {
  return a.id == b.id && same(a.position, b.position) && a.cpu_freq_hz == b.cpu_freq_hz &&
         a.max_tx_power_w == b.max_tx_power_w && a.task.data_size_bits == b.task.data_size_bits &&
         a.task.deadline_s == b.task.deadline_s &&
         a.task.intensity_cycles_per_bit == b.task.intensity_cycles_per_bit;
}

bool same(const EdgeServer& a, const EdgeServer& b) {
  return a.id == b.id && same(a.position, b.position) && a.cpu_freq_hz == b.cpu_freq_hz;
}

bool same(const SystemParams& a, const SystemParams& b) {
  return a.subcarrier_bandwidth_hz == b.subcarrier_bandwidth_hz &&
         a.noise_power_w == b.noise_power_w && a.k_user == b.k_user &&
         a.k_server == b.k_server && a.local_energy_threshold_j == b.local_energy_threshold_j &&
         a.num_subcarriers == b.num_subcarriers;
}

template <typename T>
bool same_list(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

Point uniform_in_disk(std::mt19937_64& g, double radius) {
  const double r = radius * std::sqrt(rng::uniform01(g));
  const double angle = 2.0 * std::numbers::pi * rng::uniform01(g);
  return {r * std::cos(angle), r * std::sin(angle)};
}

std::uint64_t uniform_bits(std::mt19937_64& g, Range r) {
  const auto lo = static_cast<std::uint64_t>(std::ceil(r.lo));
  const auto hi = static_cast<std::uint64_t>(std::floor(r.hi));
  if (hi < lo) throw std::invalid_argument("data_size_bits range holds no integer");
  const double span = static_cast<double>(hi - lo + 1);
  auto v = lo + static_cast<std::uint64_t>(std::floor(rng::uniform01(g) * span));
  return v > hi ? hi : v;
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
  return same_list(a.users, b.users) && same_list(a.servers, b.servers) &&
         same(a.params, b.params) && a.gains == b.gains && a.seed == b.seed &&
         a.pathloss_exponent == b.pathloss_exponent && a.area_radius_m == b.area_radius_m;
}

double path_gain(double distance_m, double exponent, double min_distance_m) {
  return std::pow(std::max(distance_m, min_distance_m), -exponent);
}

Scenario generate_scenario(std::uint64_t seed, std::size_t n_users, std::size_t n_servers,
                           std::size_t n_subcarriers, const ScenarioConfig& config) {
  if (n_users == 0) throw std::invalid_argument("generate_scenario: n_users must be >= 1");
  if (n_servers == 0) throw std::invalid_argument("generate_scenario: n_servers must be >= 1");
  if (n_subcarriers == 0)
    throw std::invalid_argument("generate_scenario: n_subcarriers must be >= 1");

  Scenario s;
  s.seed = seed;
  s.pathloss_exponent = config.pathloss_exponent;
  s.area_radius_m = config.area_radius_m;
  s.params.subcarrier_bandwidth_hz = config.subcarrier_bandwidth_hz;
  s.params.noise_power_w = dbm_to_watts(config.noise_dbm);
  s.params.k_user = config.k_user;
  s.params.k_server = config.k_server;
  s.params.local_energy_threshold_j = config.local_energy_threshold_j;
  s.params.num_subcarriers = n_subcarriers;

  s.users.reserve(n_users);
  for (std::size_t i = 0; i < n_users; ++i) {
    auto g = rng::stream(seed, rng::Tag::user, i);
    UserDevice u;
    u.id = i;
    u.position = uniform_in_disk(g, config.area_radius_m);
    u.task.data_size_bits = uniform_bits(g, config.data_size_bits);
    u.task.intensity_cycles_per_bit =
        rng::uniform(g, config.intensity_cycles_per_bit.lo, config.intensity_cycles_per_bit.hi);
    u.task.deadline_s = rng::uniform(g, config.deadline_s.lo, config.deadline_s.hi);
    u.cpu_freq_hz = rng::uniform(g, config.user_cpu_hz.lo, config.user_cpu_hz.hi);
    u.max_tx_power_w = config.max_tx_power_w;
    s.users.push_back(u);
  }

  s.servers.reserve(n_servers);
  for (std::size_t k = 0; k < n_servers; ++k) {
    auto g = rng::stream(seed, rng::Tag::server, k);
    EdgeServer e;
    e.id = k;
    e.position = uniform_in_disk(g, config.area_radius_m);
    e.cpu_freq_hz = rng::uniform(g, config.server_cpu_hz.lo, config.server_cpu_hz.hi);
    s.servers.push_back(e);
  }

  s.gains = ChannelGains(n_users, n_subcarriers, n_servers);
  for (std::size_t i = 0; i < n_users; ++i) {
    for (std::size_t k = 0; k < n_servers; ++k) {
      const double pl = path_gain(distance(s.users[i].position, s.servers[k].position),
                                  config.pathloss_exponent, config.min_distance_m);
      auto g = rng::stream(seed, rng::Tag::fading, i, k);
      for (std::size_t n = 0; n < n_subcarriers; ++n) s.gains(i, n, k) = pl * rng::exponential1(g);
    }
  }
  return s;
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& what) { throw ScenarioError(what); };
  try {
    validate(s.params);
  } catch (const std::invalid_argument& e) {
    fail(std::string("params: ") + e.what());
  }
  if (!(s.area_radius_m > 0.0)) fail("area_radius_m: must be positive");
  if (!std::isfinite(s.pathloss_exponent)) fail("pathloss_exponent: must be finite");
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const auto& u = s.users[i];
    const std::string where = "users[" + std::to_string(i) + "]";
    if (u.id != i) fail(where + ".id: expected " + std::to_string(i));
    try {
      validate(u);
    } catch (const std::invalid_argument& e) {
      fail(where + ": " + e.what());
    }
    if (std::hypot(u.position.x_m, u.position.y_m) > s.area_radius_m * (1.0 + 1e-12))
      fail(where + ".position: outside deployment disk");
  }
  for (std::size_t k = 0; k < s.servers.size(); ++k) {
    const std::string where = "servers[" + std::to_string(k) + "]";
    if (s.servers[k].id != k) fail(where + ".id: expected " + std::to_string(k));
    try {
      validate(s.servers[k]);
    } catch (const std::invalid_argument& e) {
      fail(where + ": " + e.what());
    }
  }
  if (s.gains.users() != s.users.size() || s.gains.subcarriers() != s.params.num_subcarriers ||
      s.gains.servers() != s.servers.size())
    fail("gains.dims: do not match users/subcarriers/servers");
  const auto& v = s.gains.values();
  for (std::size_t j = 0; j < v.size(); ++j)
    if (!(v[j] >= 0.0) || !std::isfinite(v[j]))
      fail("gains.values[" + std::to_string(j) + "]: must be finite and nonnegative");
}

// ---------------------------------------------------------------------------
// Serialization

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& text, const std::string& field) {
  if (text.empty()) throw ScenarioError(field + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw ScenarioError(field + ": malformed number '" + text + "'");
  return v;
}

namespace {

using nlohmann::json;

constexpr const char* kFormat = "mec-scenario";
constexpr int kVersion = 1;

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(where + "." + key + ": missing");
  return *it;
}

double real(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  const std::string field = where + "." + key;
  if (!v.is_string()) throw ScenarioError(field + ": expected a hex-float string");
  return parse_hex_double(v.get<std::string>(), field);
}

std::uint64_t count(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number_unsigned()) throw ScenarioError(where + "." + key + ": expected unsigned integer");
  return v.get<std::uint64_t>();
}

}  // namespace

std::string to_text(const Scenario& s) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["seed"] = s.seed;
  doc["pathloss_exponent"] = hex_double(s.pathloss_exponent);
  doc["area_radius_m"] = hex_double(s.area_radius_m);
  doc["params"] = {
      {"subcarrier_bandwidth_hz", hex_double(s.params.subcarrier_bandwidth_hz)},
      {"noise_power_w", hex_double(s.params.noise_power_w)},
      {"k_user", hex_double(s.params.k_user)},
      {"k_server", hex_double(s.params.k_server)},
      {"local_energy_threshold_j", hex_double(s.params.local_energy_threshold_j)},
      {"num_subcarriers", s.params.num_subcarriers},
  };
  json users = json::array();
  for (const auto& u : s.users) {
    users.push_back({
        {"id", u.id},
        {"x_m", hex_double(u.position.x_m)},
        {"y_m", hex_double(u.position.y_m)},
        {"cpu_freq_hz", hex_double(u.cpu_freq_hz)},
        {"max_tx_power_w", hex_double(u.max_tx_power_w)},
        {"data_size_bits", u.task.data_size_bits},
        {"deadline_s", hex_double(u.task.deadline_s)},
        {"intensity_cycles_per_bit", hex_double(u.task.intensity_cycles_per_bit)},
    });
  }
  doc["users"] = std::move(users);
  json servers = json::array();
  for (const auto& e : s.servers) {
    servers.push_back({
        {"id", e.id},
        {"x_m", hex_double(e.position.x_m)},
        {"y_m", hex_double(e.position.y_m)},
        {"cpu_freq_hz", hex_double(e.cpu_freq_hz)},
    });
  }
  doc["servers"] = std::move(servers);
  json values = json::array();
  for (double g : s.gains.values()) values.push_back(hex_double(g));
  doc["gains"] = {
      {"dims", {s.gains.users(), s.gains.subcarriers(), s.gains.servers()}},
      {"order", "user,subcarrier,server"},
      {"values", std::move(values)},
  };
  return doc.dump(1) + "\n";
}

Scenario from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("document: ") + e.what());
  }
  const std::string root = "scenario";
  const json& format = member(doc, "format", root);
  if (!format.is_string() || format.get<std::string>() != kFormat)
    throw ScenarioError("scenario.format: expected \"mec-scenario\"");
  if (count(doc, "version", root) != kVersion)
    throw ScenarioError("scenario.version: unsupported version");

  Scenario s;
  s.seed = count(doc, "seed", root);
  s.pathloss_exponent = real(doc, "pathloss_exponent", root);
  s.area_radius_m = real(doc, "area_radius_m", root);

  const json& p = member(doc, "params", root);
  s.params.subcarrier_bandwidth_hz = real(p, "subcarrier_bandwidth_hz", "params");
  s.params.noise_power_w = real(p, "noise_power_w", "params");
  s.params.k_user = real(p, "k_user", "params");
  s.params.k_server = real(p, "k_server", "params");
  s.params.local_energy_threshold_j = real(p, "local_energy_threshold_j", "params");
  s.params.num_subcarriers = count(p, "num_subcarriers", "params");

  const json& users = member(doc, "users", root);
  if (!users.is_array()) throw ScenarioError("users: expected an array");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::string where = "users[" + std::to_string(i) + "]";
    const json& ju = users[i];
    UserDevice u;
    u.id = count(ju, "id", where);
    u.position = {real(ju, "x_m", where), real(ju, "y_m", where)};
    u.cpu_freq_hz = real(ju, "cpu_freq_hz", where);
    u.max_tx_power_w = real(ju, "max_tx_power_w", where);
    u.task.data_size_bits = count(ju, "data_size_bits", where);
    u.task.deadline_s = real(ju, "deadline_s", where);
    u.task.intensity_cycles_per_bit = real(ju, "intensity_cycles_per_bit", where);
    s.users.push_back(u);
  }

  const json& servers = member(doc, "servers", root);
  if (!servers.is_array()) throw ScenarioError("servers: expected an array");
  for (std::size_t k = 0; k < servers.size(); ++k) {
    const std::string where = "servers[" + std::to_string(k) + "]";
    const json& js = servers[k];
    EdgeServer e;
    e.id = count(js, "id", where);
    e.position = {real(js, "x_m", where), real(js, "y_m", where)};
    e.cpu_freq_hz = real(js, "cpu_freq_hz", where);
    s.servers.push_back(e);
  }

  const json& g = member(doc, "gains", root);
  const json& dims = member(g, "dims", "gains");
  if (!dims.is_array() || dims.size() != 3) throw ScenarioError("gains.dims: expected 3 entries");
  for (const auto& d : dims)
    if (!d.is_number_unsigned()) throw ScenarioError("gains.dims: expected unsigned integers");
  const json& values = member(g, "values", "gains");
  if (!values.is_array()) throw ScenarioError("gains.values: expected an array");
  std::vector<double> v;
  v.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const std::string field = "gains.values[" + std::to_string(j) + "]";
    if (!values[j].is_string()) throw ScenarioError(field + ": expected a hex-float string");
    v.push_back(parse_hex_double(values[j].get<std::string>(), field));
  }
  s.gains = ChannelGains(dims[0].get<std::size_t>(), dims[1].get<std::size_t>(),
                         dims[2].get<std::size_t>(), std::move(v));
  validate(s);
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  validate(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_text(s);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace mec
