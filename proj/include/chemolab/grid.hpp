#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace chemolab {

/// A point of the rectangular domain; unused coordinates are zero.
using Point = std::array<double, 2>;

/// Cell-centred tensor grid on [0, L_x] (x [0, L_y]).
///
/// Node (i, j) sits at ((i + 1/2) h_x, (j + 1/2) h_y). Storage is row-major
/// over shape (n_x, n_y): the flat index is i * n_y + j, so the y index runs
/// fastest. In one dimension n_y = 1 and L_y is carried as 1 but does not
/// enter the measure.
class Grid {
public:
    static constexpr std::size_t min_cells = 8;

    Grid() = default;
    static Grid line(double length, std::size_t cells);
    static Grid rectangle(double length_x, double length_y, std::size_t cells_x,
                          std::size_t cells_y);

    int dim() const noexcept { return dim_; }
    double length(int axis) const { return lengths_[axis]; }
    std::size_t count(int axis) const { return counts_[axis]; }
    double spacing(int axis) const { return lengths_[axis] / static_cast<double>(counts_[axis]); }
    double min_spacing() const;
    std::size_t size() const noexcept { return counts_[0] * counts_[1]; }
    double measure() const;
    double cell_volume() const;

    std::size_t index(std::size_t i, std::size_t j = 0) const { return i * counts_[1] + j; }
    Point node(std::size_t flat) const;

    /// Same grid with every axis refined by `factor`.
    Grid refined(std::size_t factor) const;

    bool operator==(const Grid& other) const = default;

private:
    Grid(int dim, std::array<double, 2> lengths, std::array<std::size_t, 2> counts);

    int dim_ = 1;
    std::array<double, 2> lengths_{1.0, 1.0};
    std::array<std::size_t, 2> counts_{min_cells, 1};
};

/// Scalar function sampled at the grid nodes.
class Field {
public:
    Field() = default;
    explicit Field(const Grid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}
    Field(const Grid& grid, std::vector<double> values);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double min() const;
    double max() const;
    bool all_finite() const;

    template <class F>
    static Field from_function(const Grid& grid, F&& f) {
        Field out(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) out[k] = f(grid.node(k));
        return out;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// max_k |a_k - b_k|; grids must match.
double sup_distance(const Field& a, const Field& b);

/// Average fine cells onto the grid that is coarser by `factor` per axis.
Field restrict_average(const Field& fine, std::size_t factor);

/// Binary layout: "CHFD" magic, uint32 version (1), uint32 dim, uint32 n_x,
/// uint32 n_y, float64 L_x, float64 L_y, then n_x * n_y float64 values in
/// storage order. All little-endian.
void write_field_binary(std::ostream& out, const Field& f);
Field read_field_binary(std::istream& in);
void write_field_binary(const std::string& path, const Field& f);
Field read_field_binary(const std::string& path);

/// CSV with header "x,value" (1D) or "x,y,value" (2D).
void write_field_csv(std::ostream& out, const Field& f);

}  // namespace chemolab
