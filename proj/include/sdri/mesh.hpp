#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "sdri/geometry.hpp"

namespace sdri {

enum class Region : std::uint8_t { Film, Substrate };

struct MeshOptions {
    double min_angle_deg = 20.0;
    /// Substrate polygons are meshed only when set.
    bool include_substrate = true;
    /// Extra points the quality refinement may add, as a multiple of the initial count.
    double refine_budget = 8.0;
    /// Skinny triangles smaller than this times h are not refined.
    double min_size_ratio = 0.02;
};

/// Triangulation of A and S. Geometric points carry the triangles; nodes
/// carry the displacement and are duplicated along cut edges (cracks and
/// delaminated contact) so that each side owns its copy.
struct Mesh {
    std::vector<Vec2> points;
    std::vector<std::array<int, 3>> tris;  // counter-clockwise point ids
    std::vector<Region> region;
    std::vector<int> component;  // film component per triangle, -1 on substrate
    std::vector<std::pair<int, int>> constraint_edges;  // (lo, hi) point ids
    std::vector<std::pair<int, int>> cut_edges;         // subset of constraint_edges

    std::vector<int> node_point;
    std::vector<std::array<int, 3>> tri_nodes;
    std::vector<std::pair<int, int>> doubled;  // (primary node, duplicate node)
    double h = 0.0;

    int num_nodes() const { return static_cast<int>(node_point.size()); }
    Vec2 node(int n) const { return points[node_point[n]]; }
    double tri_area(std::size_t t) const;
    double min_angle_deg() const;
    double region_area(Region r) const;
};

/// Constrained quality triangulation of A (and S unless disabled) with target
/// edge length h. Crack slits and delamination segments become cut edges;
/// filaments carry no material and are ignored.
Mesh triangulate(const FreeCrystal& a, const Domain& dom, double h, const MeshOptions& opt = {});

/// Rebuilds node numbering and duplicates from cut_edges.
void assign_nodes(Mesh& m);

/// Red refinement: every triangle split into four, cut edges inherited.
Mesh refine_uniform(const Mesh& m);

}  // namespace sdri
