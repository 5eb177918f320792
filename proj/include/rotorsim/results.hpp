#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rotorsim {

inline constexpr int kResultsSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "1.0.0";

/// Uniformly timestamped wide table. Every row is one control tick; columns
/// belonging to slower sensors hold NaN on rows without a sample.
class ResultsTable {
 public:
  ResultsTable() = default;
  explicit ResultsTable(std::vector<std::string> columns);

  std::size_t rows() const { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::string>& columns() const { return names_; }
  bool has_column(std::string_view name) const;
  std::size_t index(std::string_view name) const;  // throws Error when missing

  void reserve(std::size_t rows) { data_.reserve(rows * cols_); }
  /// Appends a NaN-filled row and returns a pointer to its first cell.
  double* append_row();
  double at(std::size_t row, std::size_t col) const { return data_[row * cols_ + col]; }
  double at(std::size_t row, std::string_view col) const { return at(row, index(col)); }
  std::vector<double> column(std::string_view name) const;

  /// Header row then one line per row; shortest round-trip number format,
  /// NaN written as `nan`.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<std::string> names_;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Formats a double with the shortest representation that round-trips.
std::string format_number(double v);

/// Column names for a vehicle with `num_rotors` rotors.
std::vector<std::string> results_schema(std::size_t num_rotors);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace rotorsim
