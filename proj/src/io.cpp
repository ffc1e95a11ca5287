#include "magscat/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "magscat/propagator.hpp"

namespace magscat {

namespace {
static_assert(std::endian::native == std::endian::little,
              "grid dumps are defined little-endian; this build targets LE hosts");

void write_bytes(const std::filesystem::path& p, const void* data, std::size_t n) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + p.string());
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!os) throw std::runtime_error("short write: " + p.string());
}
}  // namespace

void dump_field(const std::filesystem::path& path_base, const Field& f,
                const std::string& field_name) {
  const Grid& g = f.grid();
  nlohmann::json meta{{"n", g.dim()}, {"N", g.n_per_axis()}, {"L", g.half_width()},
                      {"field_name", field_name}};
  std::ofstream js(path_base.string() + ".json", std::ios::trunc);
  js << meta.dump(2) << "\n";
  write_bytes(path_base.string() + ".f64", f.data(), f.size() * sizeof(cplx));
}

void dump_real_field(const std::filesystem::path& path_base, const std::vector<double>& values,
                     const Grid& grid, const std::string& field_name) {
  if (values.size() != grid.size()) throw std::invalid_argument("dump_real_field: size mismatch");
  std::vector<cplx> c(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) c[i] = values[i];
  nlohmann::json meta{{"n", grid.dim()}, {"N", grid.n_per_axis()}, {"L", grid.half_width()},
                      {"field_name", field_name}};
  std::ofstream js(path_base.string() + ".json", std::ios::trunc);
  js << meta.dump(2) << "\n";
  write_bytes(path_base.string() + ".f64", c.data(), c.size() * sizeof(cplx));
}

Field load_field(const std::filesystem::path& path_base) {
  std::ifstream js(path_base.string() + ".json");
  if (!js) throw std::runtime_error("missing sidecar: " + path_base.string() + ".json");
  nlohmann::json meta = nlohmann::json::parse(js);
  auto grid = make_grid(meta.at("n").get<int>(), meta.at("N").get<int>(), meta.at("L").get<double>());
  std::ifstream bs(path_base.string() + ".f64", std::ios::binary);
  if (!bs) throw std::runtime_error("missing dump: " + path_base.string() + ".f64");
  std::vector<cplx> v(grid->size());
  bs.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
  if (static_cast<std::size_t>(bs.gcount()) != v.size() * sizeof(cplx))
    throw std::runtime_error("truncated dump: " + path_base.string() + ".f64");
  return Field(std::move(grid), std::move(v));
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), n_cols_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  try {
    write_bytes(path_, buffer_.data(), buffer_.size());
  } catch (...) {
    // destructor must not throw; a failed artifact write surfaces via the
    // missing file downstream
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (const double x : cells) s.push_back(format_g17(x));
  row(s);
}

void write_conservation_csv(const std::filesystem::path& path,
                            const std::vector<ConservationSample>& series) {
  CsvWriter w(path, {"t", "mass", "energy"});
  for (const auto& s : series) w.row_numeric({s.t, s.mass, s.energy});
}

void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& sino) {
  CsvWriter w(path, {"theta_index", "theta", "s", "re_value", "im_value", "source", "xi_mag"});
  for (std::size_t ia = 0; ia < sino.n_theta(); ++ia)
    for (std::size_t is = 0; is < sino.n_s(); ++is) {
      const cplx v = sino.at(ia, is);
      w.row({std::to_string(ia), format_g17(sino.angles[ia]), format_g17(sino.offsets[is]),
             format_g17(v.real()), format_g17(v.imag()), sino.provenance,
             format_g17(sino.xi_mag)});
    }
}

Sinogram read_sinogram_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  std::getline(is, line);  // header
  Sinogram s;
  std::vector<double> thetas, offs;
  std::vector<cplx> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != 7) throw std::runtime_error("malformed sinogram CSV row");
    thetas.push_back(std::stod(cells[1]));
    offs.push_back(std::stod(cells[2]));
    vals.emplace_back(std::stod(cells[3]), std::stod(cells[4]));
    s.provenance = cells[5];
    s.xi_mag = std::stod(cells[6]);
  }
  // Recover the rectangular (angle x offset) layout.
  for (const double t : thetas)
    if (s.angles.empty() || t != s.angles.back()) s.angles.push_back(t);
  const std::size_t ns = thetas.size() / s.angles.size();
  s.offsets.assign(offs.begin(), offs.begin() + static_cast<std::ptrdiff_t>(ns));
  s.values = std::move(vals);
  s.validate();
  return s;
}

}  // namespace magscat
