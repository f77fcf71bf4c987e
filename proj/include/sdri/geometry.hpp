#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdri/vec2.hpp"

namespace sdri {

/// A simple polygon with optional polygonal holes. After normalize() the outer
/// ring is counter-clockwise and holes are clockwise, so material always lies
/// to the left of every edge and Segment::right_normal() is outward.
struct PolygonWithHoles {
    Ring outer;
    std::vector<Ring> holes;

    void normalize();
    std::vector<Segment> edges() const;
};

struct BoundingBox {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    double diameter() const { return distance(lo, hi); }
    void expand(Vec2 p);
    static BoundingBox of(const Ring& r);
};

/// A piece of the contact surface Sigma with the substrate's outward normal
/// (pointing into the container).
struct ContactSegment {
    Segment seg;
    Vec2 normal;
};

/// Container, substrate and derived contact surface.
struct Domain {
    PolygonWithHoles container;
    std::vector<PolygonWithHoles> substrates;
    std::vector<ContactSegment> contact;
    double snap_tol = 1e-9;

    BoundingBox bbox() const;
    double contact_length() const;
    /// Contact segments chained into maximal polylines.
    std::vector<Polyline> contact_polylines() const;
    /// Index of the contact segment collinear with and overlapping s (within snap_tol), if any.
    std::optional<std::size_t> contact_index_at(Vec2 p) const;
};

/// Builds the domain and derives Sigma as the edge-wise overlap of the
/// substrate and container boundaries. snap_tol defaults to 1e-9 times the
/// scene diameter.
Domain build_domain(PolygonWithHoles container, std::vector<PolygonWithHoles> substrates,
                    std::optional<double> snap_tol = std::nullopt);

enum class SlitTag { Crack, Filament };

struct Slit {
    Polyline vertices;
    SlitTag tag = SlitTag::Crack;

    std::vector<Segment> segments() const;
    double length() const;
};

/// The free crystal A: polygonal components, zero-width slits and the set of
/// delaminated contact segments.
struct FreeCrystal {
    std::vector<PolygonWithHoles> components;
    std::vector<Slit> slits;
    std::vector<Segment> delamination;

    void normalize();
    bool empty() const { return components.empty() && slits.empty(); }
    /// Every ring edge and slit segment.
    std::vector<Segment> boundary_segments() const;
};

enum class ArcClass { FreeBoundary = 0, Crack, Filament, WettingLayer, Contact, Delamination };
inline constexpr std::size_t kArcClassCount = 6;
std::string_view to_string(ArcClass c);

struct ClassifiedArc {
    Segment segment;
    ArcClass cls = ArcClass::FreeBoundary;
    Vec2 normal;
    int multiplicity = 1;
    int component = -1;        // owning component, -1 for slits
    int contact_index = -1;    // Domain::contact index for arcs on Sigma
    bool on_wall = false;      // free boundary lying on the container wall away from Sigma
    bool corner_incidence = false;  // wetting layer touching a corner of Sigma
};

/// Partition of the crystal boundary into the six arc classes.
std::vector<ClassifiedArc> classify_boundary(const FreeCrystal& a, const Domain& dom);

struct ClassTotals {
    std::array<double, kArcClassCount> length{};    // H^1 measure per class
    std::array<double, kArcClassCount> weighted{};  // multiplicity-weighted
    double total_weighted() const;
};
ClassTotals class_totals(const std::vector<ClassifiedArc>& arcs);

double ring_signed_area(const Ring& r);
double area(const PolygonWithHoles& p);
double area(const FreeCrystal& a);
/// Length of the boundary arcs, optionally restricted to one class (unweighted).
double boundary_length(const FreeCrystal& a, const Domain& dom, std::optional<ArcClass> filter = std::nullopt);

/// Connected components of the union of boundary loops and slit curves;
/// curves closer than snap_tol are merged.
int component_count(const FreeCrystal& a, double snap_tol);

/// Group id per boundary element: components' rings in order (outer, holes...),
/// then slits. Used by project_m.
struct BoundaryElement {
    enum class Kind { Outer, Hole, Slit } kind;
    int component = -1;
    int index = -1;  // hole index or slit index
};
std::vector<BoundaryElement> boundary_elements(const FreeCrystal& a);
std::vector<int> boundary_groups(const FreeCrystal& a, double snap_tol);

/// Signed distance to the boundary, negative inside A, +inf if the boundary is empty.
double sdist(Vec2 x, const FreeCrystal& a);
/// Sup over a grid on the container's bounding box of |sdist(., A1) - sdist(., A2)|.
double hausdorff_gap(const FreeCrystal& a1, const FreeCrystal& a2, const Domain& dom, int grid = 256);

// Predicates ---------------------------------------------------------------

double point_segment_distance(Vec2 p, const Segment& s);
double segment_distance(const Segment& s, const Segment& t);
/// True if the open segments cross at a single interior point of both.
bool segments_cross(const Segment& s, const Segment& t, double tol);
/// Crossing-number test; boundary points return on_boundary_value.
bool point_in_ring(Vec2 p, const Ring& r);
double ring_boundary_distance(Vec2 p, const Ring& r);
enum class Location { Outside, Boundary, Inside };
Location locate(Vec2 p, const PolygonWithHoles& poly, double tol);
Location locate(Vec2 p, const FreeCrystal& a, double tol);
bool ring_is_simple(const Ring& r, double tol);
/// True when t is collinear with s (within tol) and their overlap has positive length.
bool collinear_overlap(const Segment& s, const Segment& t, double tol, double* t0 = nullptr, double* t1 = nullptr);

/// Reason the crystal violates its invariants within dom, or nullopt when valid.
std::optional<std::string> check_crystal(const FreeCrystal& a, const Domain& dom, int m);
/// Throws GeometryError(InvariantViolation) when check_crystal reports a problem.
void validate_crystal(const FreeCrystal& a, const Domain& dom, int m);

// Constructors used by presets, probes and tests.
Ring make_rectangle(Vec2 lo, Vec2 hi);
/// Axis-aligned rectangle with each side subdivided into per_side edges.
Ring make_subdivided_rectangle(Vec2 lo, Vec2 hi, int per_side);
Ring make_regular_polygon(Vec2 center, double radius, int n, double phase = 0.0);

}  // namespace sdri
