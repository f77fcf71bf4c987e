#pragma once

#include <array>
#include <vector>

#include "sdri/geometry.hpp"

namespace sdri::detail {

/// Incremental Bowyer-Watson triangulation inside a super-triangle.
/// Triangles are counter-clockwise; neighbour n[i] is across the edge
/// opposite vertex v[i].
class Delaunay {
public:
    explicit Delaunay(const BoundingBox& box, double merge_tol);

    /// Inserts p and returns its vertex id; a point within merge_tol of an
    /// existing vertex returns that vertex instead.
    int insert(Vec2 p);

    const std::vector<Vec2>& points() const { return pts_; }
    /// Number of user points (the three super vertices are excluded).
    int num_points() const { return static_cast<int>(pts_.size()) - 3; }
    /// User-visible triangles with vertex ids shifted so that user points start at 0.
    std::vector<std::array<int, 3>> triangles() const;
    Vec2 point(int user_id) const { return pts_[user_id + 3]; }

private:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> n;
        bool alive;
    };

    int locate(Vec2 p) const;
    bool in_circle(const Tri& t, Vec2 p) const;
    int new_tri(std::array<int, 3> v);

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    double merge_tol_;
    mutable int last_ = 0;
};

double in_circle_det(Vec2 a, Vec2 b, Vec2 c, Vec2 p);
Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);
/// Smallest interior angle of triangle (a, b, c) in degrees.
double min_angle_deg(Vec2 a, Vec2 b, Vec2 c);

}  // namespace sdri::detail
