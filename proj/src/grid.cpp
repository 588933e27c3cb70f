#include "chemolab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

#include "chemolab/csv.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

Grid::Grid(int dim, std::array<double, 2> lengths, std::array<std::size_t, 2> counts)
    : dim_(dim), lengths_(lengths), counts_(counts) {
    for (int a = 0; a < dim_; ++a) {
        if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a]))
            throw InvalidArgument("grid length must be positive and finite");
        if (counts_[a] < min_cells) throw InvalidArgument("grid needs at least 8 cells per axis");
    }
}

Grid Grid::line(double length, std::size_t cells) { return Grid(1, {length, 1.0}, {cells, 1}); }

Grid Grid::rectangle(double length_x, double length_y, std::size_t cells_x, std::size_t cells_y) {
    return Grid(2, {length_x, length_y}, {cells_x, cells_y});
}

double Grid::min_spacing() const {
    return dim_ == 1 ? spacing(0) : std::min(spacing(0), spacing(1));
}

double Grid::measure() const { return dim_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1]; }

double Grid::cell_volume() const { return measure() / static_cast<double>(size()); }

Point Grid::node(std::size_t flat) const {
    const std::size_t i = flat / counts_[1];
    const std::size_t j = flat % counts_[1];
    Point p{(static_cast<double>(i) + 0.5) * spacing(0), 0.0};
    if (dim_ == 2) p[1] = (static_cast<double>(j) + 0.5) * spacing(1);
    return p;
}

Grid Grid::refined(std::size_t factor) const {
    if (dim_ == 1) return line(lengths_[0], counts_[0] * factor);
    return rectangle(lengths_[0], lengths_[1], counts_[0] * factor, counts_[1] * factor);
}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("field size does not match grid");
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

double sup_distance(const Field& a, const Field& b) {
    if (a.size() != b.size()) throw InvalidArgument("sup_distance: grid mismatch");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

Field restrict_average(const Field& fine, std::size_t factor) {
    const Grid& g = fine.grid();
    if (g.count(0) % factor != 0 || (g.dim() == 2 && g.count(1) % factor != 0))
        throw InvalidArgument("restrict_average: counts not divisible by factor");
    const Grid coarse = g.dim() == 1
                            ? Grid::line(g.length(0), g.count(0) / factor)
                            : Grid::rectangle(g.length(0), g.length(1), g.count(0) / factor,
                                              g.count(1) / factor);
    Field out(coarse);
    const std::size_t fy = g.dim() == 2 ? factor : 1;
    const double w = 1.0 / static_cast<double>(factor * fy);
    for (std::size_t i = 0; i < coarse.count(0); ++i)
        for (std::size_t j = 0; j < coarse.count(1); ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < factor; ++a)
                for (std::size_t b = 0; b < fy; ++b) s += fine[g.index(i * factor + a, j * fy + b)];
            out[coarse.index(i, j)] = s * w;
        }
    return out;
}

namespace {

constexpr char magic[4] = {'C', 'H', 'F', 'D'};
constexpr std::uint32_t format_version = 1;

static_assert(std::endian::native == std::endian::little, "binary field IO assumes little-endian");

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw InvalidArgument("truncated field binary");
    return v;
}

}  // namespace

void write_field_binary(std::ostream& out, const Field& f) {
    const Grid& g = f.grid();
    out.write(magic, 4);
    put<std::uint32_t>(out, format_version);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.count(0)));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.count(1)));
    put<double>(out, g.length(0));
    put<double>(out, g.length(1));
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
}

Field read_field_binary(std::istream& in) {
    char m[4];
    in.read(m, 4);
    if (!in || std::memcmp(m, magic, 4) != 0) throw InvalidArgument("not a field binary");
    if (get<std::uint32_t>(in) != format_version) throw InvalidArgument("unsupported field version");
    const auto dim = get<std::uint32_t>(in);
    const auto nx = get<std::uint32_t>(in);
    const auto ny = get<std::uint32_t>(in);
    const auto lx = get<double>(in);
    const auto ly = get<double>(in);
    Grid g;
    if (dim == 1 && ny == 1)
        g = Grid::line(lx, nx);
    else if (dim == 2)
        g = Grid::rectangle(lx, ly, nx, ny);
    else
        throw InvalidArgument("bad field header");
    std::vector<double> values(g.size());
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) throw InvalidArgument("truncated field binary");
    return Field(g, std::move(values));
}

void write_field_binary(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open " + path);
    write_field_binary(out, f);
}

Field read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    return read_field_binary(in);
}

void write_field_csv(std::ostream& out, const Field& f) {
    const Grid& g = f.grid();
    if (g.dim() == 1) {
        csv::header(out, {"x", "value"});
        for (std::size_t k = 0; k < f.size(); ++k) csv::row(out, {g.node(k)[0], f[k]});
    } else {
        csv::header(out, {"x", "y", "value"});
        for (std::size_t k = 0; k < f.size(); ++k) {
            const Point p = g.node(k);
            csv::row(out, {p[0], p[1], f[k]});
        }
    }
}

}  // namespace chemolab
