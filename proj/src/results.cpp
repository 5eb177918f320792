#include "rotorsim/results.hpp"

#include "rotorsim/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace rotorsim {

ResultsTable::ResultsTable(std::vector<std::string> columns) : names_(std::move(columns)), cols_(names_.size()) {}

bool ResultsTable::has_column(std::string_view name) const {
  for (const auto& n : names_)
    if (n == name) return true;
  return false;
}

std::size_t ResultsTable::index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw Error("results table has no column '" + std::string(name) + "'");
}

double* ResultsTable::append_row() {
  const std::size_t start = data_.size();
  data_.resize(start + cols_, std::numeric_limits<double>::quiet_NaN());
  return data_.data() + start;
}

std::vector<double> ResultsTable::column(std::string_view name) const {
  const std::size_t c = index(name);
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void ResultsTable::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < cols_; ++c) os << (c ? "," : "") << names_[c];
  os << '\n';
  std::string line;
  for (std::size_t r = 0; r < rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) line += ',';
      line += format_number(at(r, c));
    }
    line += '\n';
    os << line;
  }
}

std::vector<std::string> results_schema(std::size_t n) {
  std::vector<std::string> s = {"t"};
  auto add = [&s](std::initializer_list<const char*> names) {
    for (const char* nm : names) s.emplace_back(nm);
  };
  auto add_indexed = [&s, n](const std::string& prefix) {
    for (std::size_t i = 0; i < n; ++i) s.push_back(prefix + std::to_string(i));
  };
  // ground truth
  add({"x", "y", "z", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "omega_x", "omega_y", "omega_z"});
  add_indexed("eta_");
  add({"thrust_true"});
  // trajectory
  add({"x_des", "y_des", "z_des", "vx_des", "vy_des", "vz_des", "ax_des", "ay_des", "az_des", "jx_des", "jy_des",
       "jz_des", "yaw_des", "yaw_rate_des"});
  // controller and mixer
  add({"thrust_cmd", "mx_cmd", "my_cmd", "mz_cmd", "qw_des", "qx_des", "qy_des", "qz_des"});
  add_indexed("eta_cmd_");
  add_indexed("sat_");
  // environment
  add({"wind_x", "wind_y", "wind_z"});
  // sensors
  add({"accel_x", "accel_y", "accel_z", "gyro_x", "gyro_y", "gyro_z"});
  add({"mocap_x", "mocap_y", "mocap_z", "mocap_vx", "mocap_vy", "mocap_vz", "mocap_qw", "mocap_qx", "mocap_qy",
       "mocap_qz", "mocap_omega_x", "mocap_omega_y", "mocap_omega_z"});
  // estimator
  add({"est_x", "est_y", "est_z", "est_vx", "est_vy", "est_vz", "est_qw", "est_qx", "est_qy", "est_qz",
       "est_wind_x", "est_wind_y", "est_wind_z", "est_wind_std_x", "est_wind_std_y", "est_wind_std_z"});
  return s;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rotorsim
