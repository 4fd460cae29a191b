#include "dfrc/scenario.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace dfrc {

const UserPath* User::direct_path() const {
  for (const auto& p : paths) {
    if (p.kind == PathKind::Direct) return &p;
  }
  return nullptr;
}

std::vector<const UserPath*> User::indirect_paths() const {
  std::vector<const UserPath*> out;
  for (const auto& p : paths) {
    if (p.kind == PathKind::Indirect) out.push_back(&p);
  }
  return out;
}

CVector steering(const ArrayGeometry& array, double freq, double angle) {
  const double phase = -2.0 * kPi * freq * array.element_spacing / kSpeedOfLight * std::sin(angle);
  CVector s(array.num_elements);
  for (int n = 0; n < array.num_elements; ++n) s(n) = std::polar(1.0, phase * n);
  return s;
}

CMatrix g_matrix(const CVector& rx_steer, const CVector& tx_steer, int num_slots) {
  const CMatrix block = rx_steer * tx_steer.transpose();
  CMatrix out = CMatrix::Zero(num_slots * block.rows(), num_slots * block.cols());
  for (int t = 0; t < num_slots; ++t) {
    out.block(t * block.rows(), t * block.cols(), block.rows(), block.cols()) = block;
  }
  return out;
}

double scr_calibrate(double scr, double target_power, int num_clutter) {
  if (num_clutter < 1) throw std::invalid_argument("scr_calibrate: need at least one scatterer");
  if (!(scr > 0.0)) throw std::invalid_argument("scr_calibrate: scr must be positive");
  return target_power / (scr * num_clutter);
}

void apply_scr(Scenario& scenario, double scr) {
  const int j = static_cast<int>(scenario.clutter.size());
  if (j == 0) return;
  for (auto& c : scenario.clutter) {
    c.power.resize(scenario.subcarriers.size());
    for (std::size_t k = 0; k < c.power.size(); ++k) {
      c.power[k] = scr_calibrate(scr, scenario.target_power[k], j);
    }
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

namespace {

class Collector {
 public:
  void add(std::string path, std::string message) {
    out_.push_back({std::move(path), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

std::string idx(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

bool angle_ok(double a) { return std::isfinite(a) && a > -kPi / 2 && a < kPi / 2; }

bool same_angle(double a, double b) { return std::abs(a - b) <= 1e-12; }

void check_array(Collector& c, const std::string& path, const ArrayGeometry& a) {
  if (a.num_elements < 1) c.add(path + ".num_elements", "must be at least 1");
  if (!(a.element_spacing > 0.0)) c.add(path + ".element_spacing", "must be positive");
}

void check_per_k(Collector& c, const std::string& path, const std::vector<double>& v,
                 std::size_t k, bool strictly_positive) {
  if (v.size() != k) {
    c.add(path, "expected one value per subcarrier (" + std::to_string(k) + "), got " +
                    std::to_string(v.size()));
    return;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool bad = strictly_positive ? !(v[i] > 0.0) : !(v[i] >= 0.0);
    if (bad || !std::isfinite(v[i])) {
      c.add(idx(path, i), strictly_positive ? "must be positive" : "must be non-negative");
    }
  }
}

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
  Collector c;
  check_array(c, "tx_array", s.tx_array);
  check_array(c, "radar_rx_array", s.radar_rx_array);
  const std::size_t k = s.subcarriers.size();
  if (k == 0) c.add("subcarriers", "at least one subcarrier is required");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(s.subcarriers[i] > 0.0)) c.add(idx("subcarriers", i), "frequency must be positive");
  }
  if (s.num_slots < 2) c.add("num_slots", "differential detection needs at least 2 slots");
  if (s.constellation_size < 2) c.add("constellation_size", "must be at least 2");
  if (!(s.power_budget > 0.0)) c.add("power_budget", "must be positive");

  check_per_k(c, "target_power", s.target_power, k, true);
  check_per_k(c, "radar_noise", s.radar_noise, k, true);
  if (s.target_direction.size() != k) {
    c.add("target_direction", "expected one value per subcarrier");
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      if (!angle_ok(s.target_direction[i])) {
        c.add(idx("target_direction", i), "angle outside (-90, 90) degrees");
      }
    }
  }

  for (std::size_t m = 0; m < s.users.size(); ++m) {
    const User& u = s.users[m];
    const std::string base = idx("users", m);
    check_array(c, base + ".array", u.array);
    if (u.paths.empty()) c.add(base + ".paths", "at least one path is required");
    int directs = 0;
    int indirects = 0;
    for (std::size_t q = 0; q < u.paths.size(); ++q) {
      const UserPath& p = u.paths[q];
      const std::string pp = idx(base + ".paths", q);
      if (p.kind == PathKind::Direct) {
        ++directs;
        if (!(p.power > 0.0)) c.add(pp + ".power", "direct path power must be positive");
      } else {
        ++indirects;
        if (!(p.power >= 0.0)) c.add(pp + ".power", "path power must be non-negative");
      }
      if (!angle_ok(p.departure)) c.add(pp + ".departure", "angle outside (-90, 90) degrees");
      if (!angle_ok(p.arrival)) c.add(pp + ".arrival", "angle outside (-90, 90) degrees");
    }
    if (directs > 1) c.add(base + ".paths", "at most one direct path");
    check_per_k(c, base + ".noise_power", u.noise_power, k, true);
    if (u.error_target.size() != k) {
      c.add(base + ".error_target", "expected one value per subcarrier");
    } else {
      for (std::size_t i = 0; i < k; ++i) {
        const double e = u.error_target[i];
        if (!(e > 0.0 && e < 0.5)) {
          c.add(idx(base + ".error_target", i), "error_target outside (0, 1/2)");
        }
      }
    }
    const int nm = u.array.num_elements;
    const bool direct_ok = directs == 1 && (indirects == 0 || nm > indirects);
    const bool indirect_ok = indirects > 0 && (directs == 0 || nm >= 2);
    if (u.kappa_mode == KappaMode::ForceDirect && !direct_ok) {
      c.add(base + ".kappa_mode", "force-direct needs a direct path and more antennas than indirect paths");
    } else if (u.kappa_mode == KappaMode::ForceIndirect && !indirect_ok) {
      c.add(base + ".kappa_mode", "force-indirect needs indirect paths (and 2+ antennas when a direct path exists)");
    } else if (!direct_ok && !indirect_ok && !u.paths.empty()) {
      c.add(base + ".paths", "no receive mode can isolate the direct or indirect paths");
    }
  }

  for (std::size_t j = 0; j < s.clutter.size(); ++j) {
    const auto& cl = s.clutter[j];
    const std::string base = idx("clutter", j);
    if (!angle_ok(cl.angle)) c.add(base + ".angle", "angle outside (-90, 90) degrees");
    check_per_k(c, base + ".power", cl.power, k, false);
    for (std::size_t i = 0; i < s.target_direction.size(); ++i) {
      if (same_angle(cl.angle, s.target_direction[i])) {
        c.add(base + ".angle", "clutter coincides with target direction of subcarrier " +
                                   std::to_string(i));
      }
    }
  }

  for (std::size_t l = 0; l < s.protected_directions.size(); ++l) {
    const auto& pd = s.protected_directions[l];
    const std::string base = idx("protected", l);
    if (pd.subcarrier < 0 || static_cast<std::size_t>(pd.subcarrier) >= k) {
      c.add(base + ".subcarrier", "subcarrier index out of range");
    } else if (pd.subcarrier < static_cast<int>(s.target_direction.size()) &&
               same_angle(pd.angle, s.target_direction[pd.subcarrier])) {
      c.add(base + ".angle", "protected direction coincides with target direction");
    }
    if (!angle_ok(pd.angle)) c.add(base + ".angle", "angle outside (-90, 90) degrees");
    if (!(pd.delta >= 0.0 && pd.delta <= 1.0)) c.add(base + ".delta", "delta outside [0, 1]");
  }
  return c.take();
}

Scenario random_instance(const InstanceParams& p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> angle(-p.max_angle, p.max_angle);

  Scenario s;
  for (int k = 0; k < p.num_subcarriers; ++k) s.subcarriers.push_back(p.f0 + k * p.subcarrier_spacing);
  const double spacing = kSpeedOfLight / (2.0 * s.subcarriers.back());
  s.tx_array = {p.tx_elements, spacing};
  s.radar_rx_array = {p.radar_rx_elements, spacing};
  s.num_slots = p.num_slots;
  s.constellation_size = p.constellation_size;
  s.power_budget = db_to_linear(p.power_budget_dbw);

  const auto kk = static_cast<std::size_t>(p.num_subcarriers);
  for (int k = 0; k < p.num_subcarriers; ++k) s.target_direction.push_back(angle(gen));
  s.target_power.assign(kk, db_to_linear(p.target_power_db));
  s.radar_noise.assign(kk, db_to_linear(p.radar_noise_dbw));

  auto make_user = [&](bool direct) {
    User u;
    u.array = {p.user_elements, spacing};
    u.noise_power.assign(kk, db_to_linear(p.user_noise_dbw));
    u.error_target.assign(kk, p.epsilon);
    u.kappa_mode = p.kappa_mode;
    if (direct) {
      const double dep = angle(gen);
      const double arr = angle(gen);
      u.paths.push_back({PathKind::Direct, dep, arr, db_to_linear(p.direct_power_db)});
    } else {
      const double each = db_to_linear(p.indirect_total_power_db) / p.indirect_paths_per_user;
      for (int q = 0; q < p.indirect_paths_per_user; ++q) {
        const double dep = angle(gen);
        const double arr = angle(gen);
        u.paths.push_back({PathKind::Indirect, dep, arr, each});
      }
    }
    return u;
  };
  for (int m = 0; m < p.num_direct_users; ++m) s.users.push_back(make_user(true));
  for (int m = 0; m < p.num_indirect_users; ++m) s.users.push_back(make_user(false));

  for (int j = 0; j < p.num_clutter; ++j) s.clutter.push_back({angle(gen), {}});
  apply_scr(s, db_to_linear(p.scr_db));

  for (int k = 0; k < p.num_subcarriers; ++k) {
    for (int l = 0; l < p.num_protected; ++l) s.protected_directions.push_back({k, angle(gen), p.delta});
  }
  return s;
}

}  // namespace dfrc
