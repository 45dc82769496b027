#pragma once

#include <string>

#include "tfac/space_disc.hpp"

namespace tfac {

/// Legacy ASCII VTK, DATASET STRUCTURED_POINTS, cell centres as points
/// (ORIGIN h/2, SPACING h), one SCALARS array "phi".
void write_vtk(const std::string& path, const ScalarField& field, double t);

/// `base`.bin holds little-endian float64 values in x-fastest order;
/// `base`.json describes it: {dim, M, L, t, order, dtype, endianness}.
void write_raw(const std::string& base, const ScalarField& field, double t);

/// Reads a field written by write_raw; `t` receives the stored time.
ScalarField read_raw(const std::string& base, double* t = nullptr);

/// Writes text, creating parent directories.
void write_text(const std::string& path, const std::string& text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace tfac
