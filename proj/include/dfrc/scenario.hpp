// Physical description of an OFDM dual-function radar-communication setup.
//
// All powers are linear and all angles are radians; conversions to dB and
// degrees happen only in the JSON config layer and in the CSV reports.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/linalg.hpp"

namespace dfrc {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

struct ArrayGeometry {
  int num_elements = 1;
  double element_spacing = 0.0;  // meters
};

enum class PathKind { Direct, Indirect };

struct UserPath {
  PathKind kind = PathKind::Direct;
  double departure = 0.0;  // angle at the transmitter
  double arrival = 0.0;    // angle at the user array
  double power = 0.0;      // |beta|^2 for the direct path, sigma_beta^2 for indirect ones
};

enum class KappaMode { Auto, ForceDirect, ForceIndirect };

struct User {
  ArrayGeometry array;
  std::vector<UserPath> paths;
  std::vector<double> noise_power;   // per subcarrier
  std::vector<double> error_target;  // per subcarrier, in (0, 1/2)
  KappaMode kappa_mode = KappaMode::Auto;

  const UserPath* direct_path() const;
  std::vector<const UserPath*> indirect_paths() const;
};

struct ClutterScatterer {
  double angle = 0.0;
  std::vector<double> power;  // per subcarrier
};

struct ProtectedDirection {
  int subcarrier = 0;
  double angle = 0.0;
  double delta = 1.0;  // fraction of N_t * P allowed towards `angle`
};

struct Scenario {
  ArrayGeometry tx_array;
  ArrayGeometry radar_rx_array;
  std::vector<double> subcarriers;  // center frequencies, Hz
  int num_slots = 2;
  int constellation_size = 2;
  double power_budget = 1.0;
  std::vector<User> users;
  std::vector<ClutterScatterer> clutter;
  std::vector<double> target_direction;  // per subcarrier
  std::vector<double> target_power;      // per subcarrier
  std::vector<double> radar_noise;       // per subcarrier
  std::vector<ProtectedDirection> protected_directions;

  int num_subcarriers() const { return static_cast<int>(subcarriers.size()); }
  int num_users() const { return static_cast<int>(users.size()); }
  /// Length of the stacked code u_k, T * N_t.
  Index code_length() const { return Index(num_slots) * tx_array.num_elements; }
};

struct Violation {
  std::string path;
  std::string message;
};

/// Uniform-linear-array steering vector; entry n is exp(-j 2π f b / c sin(angle) n).
CVector steering(const ArrayGeometry& array, double freq, double angle);

/// I_T ⊗ (rx tx^T), the space-time response of one propagation path.
CMatrix g_matrix(const CVector& rx_steer, const CVector& tx_steer, int num_slots);

/// Equal per-scatterer clutter power giving the requested signal-to-clutter ratio.
double scr_calibrate(double scr, double target_power, int num_clutter);

/// Every invariant violation, each tagged with the offending field path.
std::vector<Violation> validate(const Scenario& scenario);

/// Parameters of the randomized benchmark instances (defaults follow the
/// 11/4/4-antenna, 4-subcarrier, 2-slot reference setup).
struct InstanceParams {
  int tx_elements = 11;
  int radar_rx_elements = 4;
  int user_elements = 4;
  int num_subcarriers = 4;
  int num_slots = 2;
  int constellation_size = 2;
  double f0 = 2e9;
  double subcarrier_spacing = 100e3;
  double power_budget_dbw = 20.0;
  double user_noise_dbw = -150.0;
  double radar_noise_dbw = -150.0;
  double target_power_db = -160.0;
  double direct_power_db = -130.0;
  double indirect_total_power_db = -130.0;
  int num_direct_users = 2;
  int num_indirect_users = 2;
  int indirect_paths_per_user = 2;
  int num_clutter = 4;
  double scr_db = -20.0;
  int num_protected = 6;  // per subcarrier
  double delta = 1e-6;
  double epsilon = 1e-5;
  double max_angle = kPi / 3.0;
  KappaMode kappa_mode = KappaMode::Auto;
};

/// Draws one random problem instance (angles uniform in [-max_angle, max_angle]).
Scenario random_instance(const InstanceParams& params, std::uint64_t seed);

/// Replaces every clutter power with the equal split achieving `scr` against
/// each subcarrier's target power.
void apply_scr(Scenario& scenario, double scr);

double db_to_linear(double db);
double linear_to_db(double linear);
double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace dfrc
