#include "cdzsl/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "cdzsl/errors.hpp"

namespace cdzsl {

namespace {

constexpr char kMagic[4] = {'C', 'D', 'Z', 'M'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kDtypeF64 = 0;
constexpr std::uint64_t kMaxEntries = 1ULL << 48;  // implausibility cap

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

void put_f64(std::string& out, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
}

std::uint64_t take_uint(const unsigned char* p, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    }
    return v;
}

}  // namespace

Matrix read_matrix(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return read_matrix_csv(path);
    return read_matrix_container(path);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    if (path.extension() == ".csv") {
        write_matrix_csv(path, m);
    } else {
        write_matrix_container(path, m);
    }
}

Matrix read_matrix_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    constexpr std::size_t kHeader = 4 + 2 + 4 + 4 + 1;
    if (bytes.size() < kHeader) {
        throw TruncatedPayload(path.string() + ": file shorter than header");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw BadMagic(path.string() + ": bad magic, not a CDZM matrix file");
    }
    const auto version = static_cast<std::uint16_t>(take_uint(p + 4, 2));
    if (version != kVersion) {
        throw DataError(path.string() + ": unsupported container version " +
                        std::to_string(version));
    }
    const auto rows = static_cast<std::uint32_t>(take_uint(p + 6, 4));
    const auto cols = static_cast<std::uint32_t>(take_uint(p + 10, 4));
    const auto dtype = static_cast<std::uint8_t>(p[14]);
    if (dtype != kDtypeF64) {
        throw DataError(path.string() + ": unsupported dtype tag " +
                        std::to_string(dtype));
    }
    const std::uint64_t entries =
        static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    if (entries > kMaxEntries) {
        throw DimensionOverflow(path.string() + ": dimensions " +
                                std::to_string(rows) + "x" +
                                std::to_string(cols) + " overflow");
    }
    const std::uint64_t payload = entries * 8;
    if (bytes.size() - kHeader < payload) {
        throw TruncatedPayload(path.string() + ": payload needs " +
                               std::to_string(payload) + " bytes, found " +
                               std::to_string(bytes.size() - kHeader));
    }
    if (bytes.size() - kHeader > payload) {
        throw DataError(path.string() + ": trailing bytes after payload");
    }

    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    const unsigned char* q = p + kHeader;
    for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) {
            const double v = std::bit_cast<double>(take_uint(q, 8));
            q += 8;
            if (!std::isfinite(v)) {
                throw NonFiniteValue(path.string() + ": non-finite entry at (" +
                                     std::to_string(i) + "," +
                                     std::to_string(j) + ")");
            }
            m(static_cast<Index>(i), static_cast<Index>(j)) = v;
        }
    }
    return m;
}

void write_matrix_container(const std::filesystem::path& path, const Matrix& m) {
    require_finite(m, "matrix for " + path.string());
    if (m.rows() > static_cast<Index>(UINT32_MAX) ||
        m.cols() > static_cast<Index>(UINT32_MAX)) {
        throw DimensionOverflow("matrix too large for container format");
    }
    std::string out;
    out.reserve(15 + static_cast<std::size_t>(m.size()) * 8);
    out.append(kMagic, 4);
    put_u16(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    out.push_back(static_cast<char>(kDtypeF64));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            put_f64(out, m(i, j));
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write file: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + ": empty CSV file");
    }
    std::uint64_t rows = 0, cols = 0;
    if (std::sscanf(line.c_str(), "%lu,%lu", &rows, &cols) != 2) {
        throw DataError(path.string() + ": CSV header must be 'rows,cols'");
    }
    if (rows * cols > kMaxEntries) {
        throw DimensionOverflow(path.string() + ": CSV dimensions overflow");
    }
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::uint64_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            throw TruncatedPayload(path.string() + ": expected " +
                                   std::to_string(rows) + " data rows, got " +
                                   std::to_string(i));
        }
        const char* s = line.c_str();
        for (std::uint64_t j = 0; j < cols; ++j) {
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s) {
                throw DataError(path.string() + ": row " + std::to_string(i) +
                                " col " + std::to_string(j) + ": not a number");
            }
            if (!std::isfinite(v)) {
                throw NonFiniteValue(path.string() + ": non-finite value at row " +
                                     std::to_string(i) + " col " +
                                     std::to_string(j));
            }
            m(static_cast<Index>(i), static_cast<Index>(j)) = v;
            s = end;
            if (j + 1 < cols) {
                while (*s == ' ' || *s == '\t') ++s;
                if (*s != ',') {
                    throw DataError(path.string() + ": row " + std::to_string(i) +
                                    ": expected ',' after column " +
                                    std::to_string(j));
                }
                ++s;
            }
        }
    }
    return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    require_finite(m, "matrix for " + path.string());
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write file: " + path.string());
    f << m.rows() << "," << m.cols() << "\n";
    char buf[40];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            if (j) f << ",";
            f << buf;
        }
        f << "\n";
    }
    if (!f) throw DataError("write failed: " + path.string());
}

}  // namespace cdzsl
