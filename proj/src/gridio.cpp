#include "effkern/gridio.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace effkern {

namespace {

constexpr char kMagic[8] = {'E', 'K', 'G', 'R', 'I', 'D', '0', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

double get_f64(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void atomic_write(const std::string& path, const std::string& payload) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

} // namespace

Field Field::zeros(int dimension, int nx, int ny, double dx) {
    Field f;
    f.dimension = dimension;
    f.nx = nx;
    f.ny = dimension == 1 ? 1 : ny;
    f.dx = dx;
    f.values.assign(static_cast<std::size_t>(f.nx) * f.ny, 0.0);
    return f;
}

void write_grid(const std::string& path, const Field& f) {
    std::string buf;
    buf.reserve(32 + f.values.size() * 8);
    buf.append(kMagic, 8);
    put_u32(buf, static_cast<std::uint32_t>(f.dimension));
    put_u32(buf, static_cast<std::uint32_t>(f.nx));
    put_u32(buf, static_cast<std::uint32_t>(f.ny));
    put_u32(buf, 0); // reserved
    put_f64(buf, f.dx);
    put_f64(buf, f.time);
    for (double v : f.values) put_f64(buf, v);
    atomic_write(path, buf);
}

Field read_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 40 || std::memcmp(data.data(), kMagic, 8) != 0)
        throw std::runtime_error(path + ": not a grid file");
    Field f;
    f.dimension = static_cast<int>(get_u32(data.data() + 8));
    f.nx = static_cast<int>(get_u32(data.data() + 12));
    f.ny = static_cast<int>(get_u32(data.data() + 16));
    f.dx = get_f64(data.data() + 24);
    f.time = get_f64(data.data() + 32);
    std::size_t count = static_cast<std::size_t>(f.nx) * f.ny;
    if (data.size() != 40 + count * 8)
        throw std::runtime_error(path + ": truncated grid file");
    f.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) f.values[i] = get_f64(data.data() + 40 + i * 8);
    return f;
}

void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const std::vector<const std::vector<double>*>& columns) {
    if (headers.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column count mismatch");
    std::size_t rows = columns.empty() ? 0 : columns[0]->size();
    for (const auto* c : columns)
        if (c->size() != rows) throw std::invalid_argument("write_csv: ragged columns");

    std::string buf;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (i) buf.push_back(',');
        buf += headers[i];
    }
    buf.push_back('\n');
    char num[40];
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) buf.push_back(',');
            std::snprintf(num, sizeof(num), "%.17g", (*columns[c])[r]);
            buf += num;
        }
        buf.push_back('\n');
    }
    atomic_write(path, buf);
}

void write_pgm(const std::string& path, const Field& f) {
    double lo = *std::min_element(f.values.begin(), f.values.end());
    double hi = *std::max_element(f.values.begin(), f.values.end());
    double span = hi - lo;
    std::string buf = "P5\n" + std::to_string(f.nx) + " " + std::to_string(f.ny) + "\n255\n";
    for (double v : f.values) {
        int px = span > 0.0 ? static_cast<int>(255.0 * (v - lo) / span + 0.5) : 0;
        buf.push_back(static_cast<char>(std::clamp(px, 0, 255)));
    }
    atomic_write(path, buf);
}

} // namespace effkern
