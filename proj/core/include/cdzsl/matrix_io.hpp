#pragma once

#include <filesystem>

#include "cdzsl/matrix.hpp"

namespace cdzsl {

/// Binary matrix container:
///   magic "CDZM" | version u16 | rows u32 | cols u32 | dtype u8 | payload
/// dtype 0 = 64-bit float, little-endian, row-major. Round trips are
/// bit-exact. A ".csv" extension switches to the CSV dialect below.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

Matrix read_matrix_container(const std::filesystem::path& path);
void write_matrix_container(const std::filesystem::path& path, const Matrix& m);

/// CSV dialect: UTF-8, '.' decimal, comma separator, header row "rows,cols",
/// then one line per matrix row.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

}  // namespace cdzsl
