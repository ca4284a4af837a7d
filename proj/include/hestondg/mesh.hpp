#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "hestondg/model.hpp"

namespace hestondg {

struct Triangle {
    // Vertex ids ordered (base0, base1, peak): the refinement edge of
    // newest-vertex bisection is (base0, base1), the peak is the newest
    // vertex.  Orientation is counter-clockwise.
    std::array<int, 3> v;
    double area = 0.0;
    double diameter = 0.0;  // longest edge
};

struct MeshEdge {
    int a = -1, b = -1;        // vertex ids, a < b
    int tri[2] = {-1, -1};     // incident triangles; tri[1] = -1 on boundary
    int side = -1;             // boundary side id (Side), -1 for interior
    double length = 0.0;
    Eigen::Vector2d normal;    // unit normal pointing out of tri[0]

    bool is_boundary() const { return tri[1] < 0; }
};

// Conforming triangulation of a (v,x) rectangle.  Immutable once built;
// refine() returns a new mesh.
class Mesh {
  public:
    Mesh(Domain domain, std::vector<Eigen::Vector2d> vertices,
         std::vector<std::array<int, 3>> triangles);

    const Domain& domain() const { return domain_; }
    const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return tris_; }
    const std::vector<MeshEdge>& edges() const { return edges_; }
    int n_triangles() const { return static_cast<int>(tris_.size()); }

    const Eigen::Vector2d& vertex(int i) const { return vertices_[i]; }
    const Triangle& tri(int t) const { return tris_[t]; }
    // Edge ids of triangle t (unordered).
    const std::array<int, 3>& tri_edges(int t) const { return tri_edges_[t]; }

    double min_angle() const { return min_angle_; }
    double total_area() const { return total_area_; }

    // Element containing (v,x); ties on shared edges resolve to the lowest
    // element id.  Returns -1 outside the domain.
    int locate(double v, double x) const;

  private:
    Domain domain_;
    std::vector<Eigen::Vector2d> vertices_;
    std::vector<Triangle> tris_;
    std::vector<MeshEdge> edges_;
    std::vector<std::array<int, 3>> tri_edges_;
    double min_angle_ = 0.0;
    double total_area_ = 0.0;

    // coarse background grid over element bounding boxes for locate()
    int grid_n_ = 0;
    std::vector<std::vector<int>> grid_cells_;

    void build_topology();
    void build_locator();
};

// n_v x n_x cells, each split along its diagonal into two triangles whose
// refinement edge is that diagonal.
Mesh uniform_mesh(const Domain& d, int n_v, int n_x);

// Newest-vertex bisection of the marked triangles with conforming closure.
Mesh refine(const Mesh& m, const std::vector<int>& marked);

// Plain-text export: vertex coordinate table then triangle index table.
void write_mesh(std::ostream& os, const Mesh& m);

}  // namespace hestondg
