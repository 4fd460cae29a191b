#include "dfrc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include "dfrc/errors.hpp"

namespace dfrc {

namespace {

// Typed access to one JSON object with field paths for error messages.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const Json& json() const { return j_; }
  const std::string& path() const { return path_; }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void require_object() const {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow_keys(std::initializer_list<const char*> keys) const {
    require_object();
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  Node child(const std::string& key) const {
    if (!has(key)) throw ConfigError(field(key), "missing required field");
    return {j_.at(key), field(key)};
  }

  double number(const std::string& key) const { return as_number(child(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) const { return as_integer(child(key)); }
  int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  std::string string(const std::string& key) const {
    const Node n = child(key);
    if (!n.j_.is_string()) throw ConfigError(n.path_, "expected a string");
    return n.j_.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::size_t size() const {
    if (!j_.is_array()) throw ConfigError(path_, "expected an array");
    return j_.size();
  }
  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  /// A scalar broadcast to every subcarrier, or an array with one entry each.
  std::vector<double> per_subcarrier(const std::string& key, int k) const {
    const Node n = child(key);
    if (n.j_.is_number()) return std::vector<double>(k, as_number(n));
    if (n.size() != static_cast<std::size_t>(k)) {
      throw ConfigError(n.path_, "expected a number or an array of " + std::to_string(k) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_number(n.at(i)));
    return out;
  }

  std::vector<double> numbers(const std::string& key) const {
    const Node n = child(key);
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_number(n.at(i)));
    return out;
  }

  static double as_number(const Node& n) {
    if (!n.j_.is_number()) throw ConfigError(n.path_, "expected a number");
    const double v = n.j_.get<double>();
    if (!std::isfinite(v)) throw ConfigError(n.path_, "expected a finite number");
    return v;
  }

  static int as_integer(const Node& n) {
    if (!n.j_.is_number_integer()) throw ConfigError(n.path_, "expected an integer");
    const auto v = n.j_.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw ConfigError(n.path_, "integer out of range");
    }
    return static_cast<int>(v);
  }

 private:
  const Json& j_;
  std::string path_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

KappaMode kappa_from_string(const std::string& s, const std::string& path) {
  if (s == "auto") return KappaMode::Auto;
  if (s == "force-direct") return KappaMode::ForceDirect;
  if (s == "force-indirect") return KappaMode::ForceIndirect;
  throw ConfigError(path, "expected one of auto, force-direct, force-indirect");
}

std::string kappa_to_string(KappaMode m) {
  switch (m) {
    case KappaMode::ForceDirect: return "force-direct";
    case KappaMode::ForceIndirect: return "force-indirect";
    default: return "auto";
  }
}

ArrayGeometry array_from(const Node& n, double default_spacing) {
  n.allow_keys({"num_elements", "element_spacing_m"});
  ArrayGeometry a;
  a.num_elements = n.integer("num_elements");
  a.element_spacing = n.number("element_spacing_m", default_spacing);
  require(a.num_elements >= 1, n.field("num_elements"), "must be at least 1");
  require(a.element_spacing > 0.0, n.field("element_spacing_m"), "must be positive");
  return a;
}

Json array_to_json(const ArrayGeometry& a) {
  return {{"num_elements", a.num_elements}, {"element_spacing_m", a.element_spacing}};
}

std::vector<double> subcarriers_from(const Node& root) {
  const Node n = root.child("subcarriers");
  std::vector<double> f;
  if (n.json().is_array()) {
    for (std::size_t i = 0; i < n.size(); ++i) f.push_back(Node::as_number(n.at(i)));
  } else {
    n.allow_keys({"f0_hz", "spacing_hz", "count"});
    const double f0 = n.number("f0_hz");
    const double df = n.number("spacing_hz");
    const int count = n.integer("count");
    require(count >= 1, n.field("count"), "must be at least 1");
    for (int k = 0; k < count; ++k) f.push_back(f0 + k * df);
  }
  require(!f.empty(), n.path(), "at least one subcarrier is required");
  for (std::size_t i = 0; i < f.size(); ++i) {
    require(f[i] > 0.0, n.path(), "frequencies must be positive");
  }
  return f;
}

std::vector<double> db_vec(const std::vector<double>& db) {
  std::vector<double> out;
  for (double v : db) out.push_back(db_to_linear(v));
  return out;
}

Json db_json(const std::vector<double>& lin) {
  Json out = Json::array();
  for (double v : lin) out.push_back(linear_to_db(v));
  return out;
}

Scenario explicit_scenario(const Node& root) {
  Scenario s;
  s.subcarriers = subcarriers_from(root);
  const int kk = s.num_subcarriers();
  const double fmax = *std::max_element(s.subcarriers.begin(), s.subcarriers.end());
  const double half_wave = kSpeedOfLight / (2.0 * fmax);

  s.tx_array = array_from(root.child("tx_array"), half_wave);
  s.radar_rx_array = array_from(root.child("radar_rx_array"), half_wave);
  s.num_slots = root.integer("num_slots", 2);
  s.constellation_size = root.integer("constellation_size", 2);
  s.power_budget = db_to_linear(root.number("power_budget_dbw"));

  const Node radar = root.child("radar");
  radar.allow_keys({"target_directions_deg", "target_power_db", "noise_dbw"});
  for (double d : radar.per_subcarrier("target_directions_deg", kk)) s.target_direction.push_back(deg_to_rad(d));
  s.target_power = db_vec(radar.per_subcarrier("target_power_db", kk));
  s.radar_noise = db_vec(radar.per_subcarrier("noise_dbw", kk));

  std::optional<double> scr_db;
  if (root.has("clutter")) {
    const Node cl = root.child("clutter");
    cl.allow_keys({"scatterers", "scr_db"});
    if (cl.has("scr_db")) scr_db = cl.number("scr_db");
    if (cl.has("scatterers")) {
      const Node sc = cl.child("scatterers");
      for (std::size_t i = 0; i < sc.size(); ++i) {
        const Node c = sc.at(i);
        c.allow_keys({"angle_deg", "power_db"});
        ClutterScatterer cs;
        cs.angle = deg_to_rad(c.number("angle_deg"));
        if (c.has("power_db")) {
          require(!scr_db, c.field("power_db"), "give either per-scatterer powers or clutter.scr_db, not both");
          cs.power = db_vec(c.per_subcarrier("power_db", kk));
        } else {
          require(scr_db.has_value(), c.field("power_db"), "missing (or set clutter.scr_db)");
          cs.power.assign(kk, 0.0);
        }
        s.clutter.push_back(std::move(cs));
      }
    }
  }

  if (root.has("users")) {
    const Node us = root.child("users");
    for (std::size_t i = 0; i < us.size(); ++i) {
      const Node u = us.at(i);
      u.allow_keys({"num_elements", "element_spacing_m", "noise_dbw", "error_target", "kappa_mode", "paths"});
      User user;
      user.array.num_elements = u.integer("num_elements");
      user.array.element_spacing = u.number("element_spacing_m", half_wave);
      user.noise_power = db_vec(u.per_subcarrier("noise_dbw", kk));
      user.error_target = u.per_subcarrier("error_target", kk);
      user.kappa_mode = kappa_from_string(u.string("kappa_mode", "auto"), u.field("kappa_mode"));
      const Node ps = u.child("paths");
      for (std::size_t q = 0; q < ps.size(); ++q) {
        const Node p = ps.at(q);
        p.allow_keys({"kind", "departure_deg", "arrival_deg", "power_db"});
        UserPath path;
        const std::string kind = p.string("kind");
        if (kind == "direct") {
          path.kind = PathKind::Direct;
        } else if (kind == "indirect") {
          path.kind = PathKind::Indirect;
        } else {
          throw ConfigError(p.field("kind"), "expected direct or indirect");
        }
        path.departure = deg_to_rad(p.number("departure_deg"));
        path.arrival = deg_to_rad(p.number("arrival_deg"));
        path.power = db_to_linear(p.number("power_db"));
        user.paths.push_back(path);
      }
      s.users.push_back(std::move(user));
    }
  }

  if (root.has("protected")) {
    const Node pr = root.child("protected");
    for (std::size_t i = 0; i < pr.size(); ++i) {
      const Node p = pr.at(i);
      p.allow_keys({"subcarrier", "angle_deg", "delta"});
      ProtectedDirection d;
      d.subcarrier = p.integer("subcarrier");
      d.angle = deg_to_rad(p.number("angle_deg"));
      d.delta = p.number("delta");
      s.protected_directions.push_back(d);
    }
  }

  // Validate before calibrating so that bad target powers are reported as such.
  require_valid(s);
  if (scr_db && !s.clutter.empty()) apply_scr(s, db_to_linear(*scr_db));
  return s;
}

constexpr std::initializer_list<const char*> kScenarioKeys = {
    "subcarriers", "tx_array", "radar_rx_array", "num_slots", "constellation_size", "power_budget_dbw",
    "radar", "clutter", "users", "protected", "generator", "merit", "design"};

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

static std::string json_field_path(const std::string& internal) {
  static const std::vector<std::pair<std::regex, std::string>> rules = {
      {std::regex(R"(^power_budget)"), "power_budget_dbw"},
      {std::regex(R"(^target_direction)"), "radar.target_directions_deg"},
      {std::regex(R"(^target_power)"), "radar.target_power_db"},
      {std::regex(R"(^radar_noise)"), "radar.noise_dbw"},
      {std::regex(R"(^clutter\[)"), "clutter.scatterers["},
      {std::regex(R"(\.array\.)"), "."},
      {std::regex(R"(\.element_spacing$)"), ".element_spacing_m"},
      {std::regex(R"(\.noise_power)"), ".noise_dbw"},
      {std::regex(R"(\.(angle|departure|arrival)$)"), ".$1_deg"},
      {std::regex(R"(\.power(\[\d+\])?$)"), ".power_db$1"},
  };
  std::string out = internal;
  for (const auto& [re, rep] : rules) out = std::regex_replace(out, re, rep);
  return out;
}

void require_valid(const Scenario& s) {
  const auto v = validate(s);
  if (!v.empty()) throw ConfigError(json_field_path(v.front().path), v.front().message);
}

InstanceParams instance_params_from_json(const Json& j, const std::string& path) {
  const Node n(j, path);
  n.allow_keys({"seed", "tx_elements", "radar_rx_elements", "user_elements", "num_subcarriers", "num_slots",
                "constellation_size", "f0_hz", "subcarrier_spacing_hz", "power_budget_dbw", "user_noise_dbw",
                "radar_noise_dbw", "target_power_db", "direct_power_db", "indirect_total_power_db",
                "num_direct_users", "num_indirect_users", "indirect_paths_per_user", "num_clutter", "scr_db",
                "num_protected", "delta", "epsilon", "max_angle_deg", "kappa_mode"});
  InstanceParams p;
  p.tx_elements = n.integer("tx_elements", p.tx_elements);
  p.radar_rx_elements = n.integer("radar_rx_elements", p.radar_rx_elements);
  p.user_elements = n.integer("user_elements", p.user_elements);
  p.num_subcarriers = n.integer("num_subcarriers", p.num_subcarriers);
  p.num_slots = n.integer("num_slots", p.num_slots);
  p.constellation_size = n.integer("constellation_size", p.constellation_size);
  p.f0 = n.number("f0_hz", p.f0);
  p.subcarrier_spacing = n.number("subcarrier_spacing_hz", p.subcarrier_spacing);
  p.power_budget_dbw = n.number("power_budget_dbw", p.power_budget_dbw);
  p.user_noise_dbw = n.number("user_noise_dbw", p.user_noise_dbw);
  p.radar_noise_dbw = n.number("radar_noise_dbw", p.radar_noise_dbw);
  p.target_power_db = n.number("target_power_db", p.target_power_db);
  p.direct_power_db = n.number("direct_power_db", p.direct_power_db);
  p.indirect_total_power_db = n.number("indirect_total_power_db", p.indirect_total_power_db);
  p.num_direct_users = n.integer("num_direct_users", p.num_direct_users);
  p.num_indirect_users = n.integer("num_indirect_users", p.num_indirect_users);
  p.indirect_paths_per_user = n.integer("indirect_paths_per_user", p.indirect_paths_per_user);
  p.num_clutter = n.integer("num_clutter", p.num_clutter);
  p.scr_db = n.number("scr_db", p.scr_db);
  p.num_protected = n.integer("num_protected", p.num_protected);
  p.delta = n.number("delta", p.delta);
  p.epsilon = n.number("epsilon", p.epsilon);
  p.max_angle = deg_to_rad(n.number("max_angle_deg", rad_to_deg(p.max_angle)));
  p.kappa_mode = kappa_from_string(n.string("kappa_mode", "auto"), n.field("kappa_mode"));

  require(p.tx_elements >= 1, n.field("tx_elements"), "must be at least 1");
  require(p.radar_rx_elements >= 1, n.field("radar_rx_elements"), "must be at least 1");
  require(p.user_elements >= 1, n.field("user_elements"), "must be at least 1");
  require(p.num_subcarriers >= 1, n.field("num_subcarriers"), "must be at least 1");
  require(p.num_slots >= 1, n.field("num_slots"), "must be at least 1");
  require(p.constellation_size >= 2, n.field("constellation_size"), "must be at least 2");
  require(p.f0 > 0.0, n.field("f0_hz"), "must be positive");
  require(p.subcarrier_spacing >= 0.0, n.field("subcarrier_spacing_hz"), "must be non-negative");
  require(p.num_direct_users >= 0, n.field("num_direct_users"), "must be non-negative");
  require(p.num_indirect_users >= 0, n.field("num_indirect_users"), "must be non-negative");
  require(p.indirect_paths_per_user >= 1, n.field("indirect_paths_per_user"), "must be at least 1");
  require(p.num_clutter >= 0, n.field("num_clutter"), "must be non-negative");
  require(p.num_protected >= 0, n.field("num_protected"), "must be non-negative");
  require(p.delta > 0.0 && p.delta <= 1.0, n.field("delta"), "must lie in (0, 1]");
  require(p.epsilon > 0.0 && p.epsilon < 0.5, n.field("epsilon"), "must lie in (0, 1/2)");
  require(p.max_angle > 0.0 && p.max_angle <= kPi / 2.0, n.field("max_angle_deg"), "must lie in (0, 90]");
  return p;
}

Json instance_params_to_json(const InstanceParams& p) {
  return {{"tx_elements", p.tx_elements},
          {"radar_rx_elements", p.radar_rx_elements},
          {"user_elements", p.user_elements},
          {"num_subcarriers", p.num_subcarriers},
          {"num_slots", p.num_slots},
          {"constellation_size", p.constellation_size},
          {"f0_hz", p.f0},
          {"subcarrier_spacing_hz", p.subcarrier_spacing},
          {"power_budget_dbw", p.power_budget_dbw},
          {"user_noise_dbw", p.user_noise_dbw},
          {"radar_noise_dbw", p.radar_noise_dbw},
          {"target_power_db", p.target_power_db},
          {"direct_power_db", p.direct_power_db},
          {"indirect_total_power_db", p.indirect_total_power_db},
          {"num_direct_users", p.num_direct_users},
          {"num_indirect_users", p.num_indirect_users},
          {"indirect_paths_per_user", p.indirect_paths_per_user},
          {"num_clutter", p.num_clutter},
          {"scr_db", p.scr_db},
          {"num_protected", p.num_protected},
          {"delta", p.delta},
          {"epsilon", p.epsilon},
          {"max_angle_deg", rad_to_deg(p.max_angle)},
          {"kappa_mode", kappa_to_string(p.kappa_mode)}};
}

ScenarioConfig scenario_config_from_json(const Json& j) {
  const Node root(j, "");
  root.allow_keys(kScenarioKeys);
  ScenarioConfig cfg;
  if (root.has("generator")) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "generator" && it.key() != "merit" && it.key() != "design") {
        throw ConfigError(it.key(), "not allowed together with generator");
      }
    }
    const Node g = root.child("generator");
    cfg.generator = instance_params_from_json(g.json(), g.path());
    cfg.generator_seed = 1;
    if (g.has("seed")) {
      const Json& seed = g.json().at("seed");
      require(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0),
              g.field("seed"), "must be a non-negative integer");
      cfg.generator_seed = seed.get<std::uint64_t>();
    }
    cfg.scenario = random_instance(*cfg.generator, cfg.generator_seed);
    require_valid(cfg.scenario);
  } else {
    cfg.scenario = explicit_scenario(root);
  }
  if (root.has("merit")) cfg.merit = j.at("merit");
  if (root.has("design")) cfg.design = j.at("design");
  return cfg;
}

Scenario scenario_from_json(const Json& j) { return scenario_config_from_json(j).scenario; }

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  return scenario_config_from_json(read_json_file(path));
}

Json scenario_to_json(const Scenario& s) {
  Json out;
  out["subcarriers"] = s.subcarriers;
  out["tx_array"] = array_to_json(s.tx_array);
  out["radar_rx_array"] = array_to_json(s.radar_rx_array);
  out["num_slots"] = s.num_slots;
  out["constellation_size"] = s.constellation_size;
  out["power_budget_dbw"] = linear_to_db(s.power_budget);
  Json dirs = Json::array();
  for (double a : s.target_direction) dirs.push_back(rad_to_deg(a));
  out["radar"] = {{"target_directions_deg", dirs},
                  {"target_power_db", db_json(s.target_power)},
                  {"noise_dbw", db_json(s.radar_noise)}};
  Json sc = Json::array();
  for (const auto& c : s.clutter) sc.push_back({{"angle_deg", rad_to_deg(c.angle)}, {"power_db", db_json(c.power)}});
  out["clutter"] = {{"scatterers", sc}};
  Json users = Json::array();
  for (const auto& u : s.users) {
    Json paths = Json::array();
    for (const auto& p : u.paths) {
      paths.push_back({{"kind", p.kind == PathKind::Direct ? "direct" : "indirect"},
                       {"departure_deg", rad_to_deg(p.departure)},
                       {"arrival_deg", rad_to_deg(p.arrival)},
                       {"power_db", linear_to_db(p.power)}});
    }
    users.push_back({{"num_elements", u.array.num_elements},
                     {"element_spacing_m", u.array.element_spacing},
                     {"noise_dbw", db_json(u.noise_power)},
                     {"error_target", u.error_target},
                     {"kappa_mode", kappa_to_string(u.kappa_mode)},
                     {"paths", paths}});
  }
  out["users"] = users;
  Json pr = Json::array();
  for (const auto& d : s.protected_directions) {
    pr.push_back({{"subcarrier", d.subcarrier}, {"angle_deg", rad_to_deg(d.angle)}, {"delta", d.delta}});
  }
  out["protected"] = pr;
  return out;
}

MeritFunction merit_from_json(const Json& j, int num_subcarriers, const std::string& path) {
  const Node n(j, path);
  n.allow_keys({"kind", "p", "generator", "a", "weights", "pfa", "omega"});
  const std::string kind = n.string("kind");
  RVector weights;
  if (n.has("weights")) {
    const auto w = n.numbers("weights");
    require(static_cast<int>(w.size()) == num_subcarriers, n.field("weights"),
            "expected one weight per subcarrier (" + std::to_string(num_subcarriers) + ")");
    weights = Eigen::Map<const RVector>(w.data(), static_cast<Index>(w.size()));
    require((weights.array() > 0.0).all(), n.field("weights"), "weights must be positive");
    weights /= weights.sum();
  } else {
    weights = MeritFunction::uniform_weights(num_subcarriers);
  }
  auto per_k = [&](const std::string& key) {
    const auto v = n.per_subcarrier(key, num_subcarriers);
    return RVector(Eigen::Map<const RVector>(v.data(), static_cast<Index>(v.size())));
  };

  try {
    if (kind == "power-mean") {
      const double p = n.number("p");
      require(p <= 1.0, n.field("p"), "must be <= 1");
      return MeritFunction::power_mean(p, weights);
    }
    if (kind == "quasi-arithmetic") {
      const std::string g = n.string("generator");
      Generator gen;
      if (g == "exp-mean") {
        gen = Generator::exponential(n.number("a"));
      } else if (g == "radical-mean") {
        gen = Generator::radical(n.number("a"));
      } else if (g == "log") {
        gen = Generator::log();
      } else if (g == "power") {
        gen = Generator::power(n.number("p"));
      } else {
        throw ConfigError(n.field("generator"), "expected exp-mean, radical-mean, log or power");
      }
      MeritFunction f = MeritFunction::quasi_arithmetic(std::move(gen), weights);
      if (!f.is_concave()) {
        throw ConfigError(n.field("generator"),
                          "this mean is not concave and has no concave minorizer: " + f.concavity().diagnostic);
      }
      return f;
    }
    if (kind == "mutual-info") return MeritFunction::mutual_information(weights);
    if (kind == "fisher-info") return MeritFunction::fisher_information(weights);
    if (kind == "detection-prob") return MeritFunction::detection_probability(weights, per_k("pfa"));
    if (kind == "relative-entropy") return MeritFunction::relative_entropy(weights, per_k("omega"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(n.field("kind"),
                    "expected power-mean, quasi-arithmetic, mutual-info, fisher-info, detection-prob or "
                    "relative-entropy");
}

DesignOptions design_options_from_json(const Json& j, const std::string& path) {
  DesignOptions o;
  if (j.is_null()) return o;
  const Node n(j, path);
  n.allow_keys({"eta_acc", "i_max", "mm_inner_steps", "rng_seed", "init_restarts", "start_rounds", "filter_order",
                "solver_tol"});
  o.eta_acc = n.number("eta_acc", o.eta_acc);
  o.i_max = n.integer("i_max", o.i_max);
  o.mm_inner_steps = n.integer("mm_inner_steps", o.mm_inner_steps);
  if (n.has("rng_seed")) {
    const Node s = n.child("rng_seed");
    require(s.json().is_number_unsigned() || (s.json().is_number_integer() && s.json().get<std::int64_t>() >= 0),
            s.path(),
            "must be a non-negative integer");
    o.rng_seed = s.json().get<std::uint64_t>();
  }
  o.init_restarts = n.integer("init_restarts", o.init_restarts);
  o.start_rounds = n.integer("start_rounds", o.start_rounds);
  const std::string order = n.string("filter_order", "radar-first");
  if (order == "radar-first") {
    o.filter_order = FilterOrder::RadarFirst;
  } else if (order == "users-first") {
    o.filter_order = FilterOrder::UsersFirst;
  } else {
    throw ConfigError(n.field("filter_order"), "expected radar-first or users-first");
  }
  o.solver.tol = n.number("solver_tol", o.solver.tol);
  require(o.solver.tol > 0.0, n.field("solver_tol"), "must be positive");
  try {
    o.check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return o;
}

}  // namespace dfrc
