#include "towlab/csv.hpp"

#include <charconv>
#include <fstream>

namespace towlab {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path + "'");
  return out;
}

}  // namespace

void write_field_csv(const std::string& path, const ScalarField& field,
                     const std::vector<std::uint8_t>* mask) {
  const Grid& grid = field.grid();
  std::ofstream out = open_out(path);
  out << (grid.dim() == 2 ? "x,y,value" : "x,value");
  if (mask) out << ",mask";
  out << '\n';
  for (int node = 0; node < grid.node_count(); ++node) {
    out << format_double(grid.coord(node, 0));
    if (grid.dim() == 2) out << ',' << format_double(grid.coord(node, 1));
    out << ',' << format_double(field[node]);
    if (mask) out << ',' << int((*mask)[static_cast<std::size_t>(node)]);
    out << '\n';
  }
}

void write_slope_csv(const std::string& path, const SlopeReport& report) {
  std::ofstream out = open_out(path);
  out << "r,slope\n";
  for (const auto& e : report.entries)
    out << format_double(e.r) << ',' << format_double(e.slope) << '\n';
}

void write_doubling_csv(const std::string& path,
                        const std::vector<DoublingReport>& reports) {
  std::ofstream out = open_out(path);
  out << "eps,gap,wmax\n";
  for (const auto& r : reports)
    out << format_double(r.epsilon) << ',' << format_double(r.gap) << ','
        << format_double(r.w_max) << '\n';
}

}  // namespace towlab
