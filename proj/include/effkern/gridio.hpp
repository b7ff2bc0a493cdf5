#pragma once

#include <string>
#include <vector>

namespace effkern {

// Discretized scalar state on a periodic grid. Row-major: index = iy*nx+ix;
// ny == 1 in one dimension.
struct Field {
    int dimension = 1;
    int nx = 0;
    int ny = 1;
    double dx = 1.0;
    double time = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }

    static Field zeros(int dimension, int nx, int ny, double dx);
};

// Binary grid file: magic "EKGRID01", u32 dimension, u32 nx, u32 ny,
// f64 dx, f64 time, then nx*ny f64 samples. All integers and doubles are
// little-endian. Writes go through a temp file + rename.
void write_grid(const std::string& path, const Field& f);
Field read_grid(const std::string& path);

// Two-column (or more) CSV with a header row; atomic like write_grid.
void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const std::vector<const std::vector<double>*>& columns);

// 8-bit binary PGM heatmap, values mapped linearly from [min,max] to [0,255].
void write_pgm(const std::string& path, const Field& f);

} // namespace effkern
