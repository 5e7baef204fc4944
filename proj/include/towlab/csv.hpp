#pragma once

#include <string>
#include <vector>

#include "towlab/grid.hpp"
#include "towlab/verify.hpp"

namespace towlab {

// Shortest decimal representation that round-trips to the same double;
// the formatting rule behind the byte-identical reproducibility of CSV
// outputs.
std::string format_double(double v);

// Columns x[,y],value[,mask], one row per node in node order.
void write_field_csv(const std::string& path, const ScalarField& field,
                     const std::vector<std::uint8_t>* mask = nullptr);

// Columns r,slope.
void write_slope_csv(const std::string& path, const SlopeReport& report);

// Columns eps,gap,wmax.
void write_doubling_csv(const std::string& path,
                        const std::vector<DoublingReport>& reports);

}  // namespace towlab
