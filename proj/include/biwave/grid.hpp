#ifndef BIWAVE_GRID_HPP
#define BIWAVE_GRID_HPP

#include <cstddef>
#include <vector>

#include "biwave/errors.hpp"

namespace biwave {

// Uniform periodic grid on a flat torus: axis a carries points[a] nodes
// x_i = lengths[a] * i / points[a].  Node layout is row major with the last
// axis fastest; vector components are contiguous per node.
struct GridSpec {
    int dim = 1;                  // number of torus axes (1 or 2)
    std::vector<int> points;      // nodes per axis, even, >= 8
    std::vector<double> lengths;  // period per axis, > 0

    void validate() const;

    std::size_t num_points() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points[a]);
        return n;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= lengths[a] / points[a];
        return v;
    }
    double coordinate(int axis, int index) const {
        return lengths[axis] * index / points[axis];
    }
    bool operator==(const GridSpec& o) const {
        return dim == o.dim && points == o.points && lengths == o.lengths;
    }
};

GridSpec make_grid(int dim, std::vector<int> points, std::vector<double> lengths);

// Real multi-component field sampled on a GridSpec.  values[p*components + c]
// holds component c at node p.
struct Field {
    GridSpec grid;
    int components = 0;
    std::vector<double> values;

    Field() = default;
    Field(GridSpec g, int comps)
        : grid(std::move(g)),
          components(comps),
          values(grid.num_points() * static_cast<std::size_t>(comps), 0.0) {}

    double& at(std::size_t point, int c) { return values[point * components + c]; }
    double at(std::size_t point, int c) const { return values[point * components + c]; }
    std::size_t num_points() const { return grid.num_points(); }

    bool same_shape(const Field& o) const {
        return components == o.components && grid == o.grid;
    }
};

void require_same_shape(const Field& a, const Field& b, const char* where);
void require_components(const Field& a, int comps, const char* where);

// Pointwise contractions (no derivatives involved).
Field pointwise_dot(const Field& a, const Field& b);  // scalar field <a,b>
Field pointwise_norm2(const Field& a);                // scalar field |a|^2
Field pointwise_scale(const Field& a, double s);
Field pointwise_add(const Field& a, const Field& b);
Field pointwise_sub(const Field& a, const Field& b);
// out += s * a
void axpy(double s, const Field& a, Field& out);

// Quadrature: rectangle rule, exact for band-limited integrands on the torus.
// Compensated (Kahan) summation in a fixed order keeps results deterministic.
double integrate(const Field& scalar);

double l2_norm(const Field& f);            // sqrt(integrate |f|^2), any component count
double max_abs(const Field& f);            // max over entries of |value|
double max_pointwise_norm(const Field& f); // max over nodes of Euclidean norm

}  // namespace biwave

#endif
