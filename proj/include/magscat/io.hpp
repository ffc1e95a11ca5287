#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "magscat/field.hpp"
#include "magscat/tomography.hpp"

namespace magscat {

// Grid dump: raw little-endian f64 (re, im) pairs in row-major order plus a
// JSON sidecar {n, N, L, field_name}. `path_base` gets .f64/.json appended.
void dump_field(const std::filesystem::path& path_base, const Field& f,
                const std::string& field_name);
void dump_real_field(const std::filesystem::path& path_base, const std::vector<double>& values,
                     const Grid& grid, const std::string& field_name);
Field load_field(const std::filesystem::path& path_base);

// Serializes a double losslessly (17 significant digits).
std::string format_g17(double x);

// Deterministic CSV writer: fixed column order, '\n' newlines, g17 floats.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& cells);

 private:
  std::string buffer_;
  std::filesystem::path path_;
  std::size_t n_cols_;
};

void write_conservation_csv(const std::filesystem::path& path,
                            const std::vector<struct ConservationSample>& series);
void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& sino);
Sinogram read_sinogram_csv(const std::filesystem::path& path);

}  // namespace magscat
