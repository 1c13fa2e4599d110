#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace perc {

// Lattice dimensions 2..4 are supported at runtime.
inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 4;

// Coordinate magnitudes are capped so that every derived quantity used by the
// library (2n+l, 3n+l, translated boxes) stays far away from int32 overflow.
// Callers must keep n + l below 2^20.
inline constexpr std::int32_t kCoordLimit = std::int32_t{1} << 22;

// A lattice point of Z^d. Coordinates beyond the active dimension are kept at
// zero so that comparison and hashing are dimension-agnostic.
struct Point {
    std::array<std::int32_t, kMaxDim> v{0, 0, 0, 0};

    Point() = default;
    Point(std::int32_t x, std::int32_t y) : v{x, y, 0, 0} {}
    Point(std::int32_t x, std::int32_t y, std::int32_t z) : v{x, y, z, 0} {}
    Point(std::int32_t x, std::int32_t y, std::int32_t z, std::int32_t w) : v{x, y, z, w} {}

    std::int32_t& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    std::int32_t operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);

// L1 distance, over all kMaxDim slots (inactive slots are zero).
std::int64_t l1_distance(const Point& a, const Point& b);

std::string to_string(const Point& p, int dim);
Point point_from_string(const std::string& text, int dim);

// The cubic box center + [-radius, radius]^dim together with its site
// indexing scheme. Indexing is row-major with axis 0 varying fastest:
//   index(s) = sum_i (s_i - center_i + radius) * (2*radius+1)^i
// The bijection is a pure function of the box, so serialized configurations
// are portable across platforms and runs.
class BoxSpec {
public:
    BoxSpec(int dim, Point center, std::int32_t radius);

    static BoxSpec lambda(int dim, std::int32_t radius);  // centered at the origin

    int dim() const { return dim_; }
    const Point& center() const { return center_; }
    std::int32_t radius() const { return radius_; }
    std::int32_t side() const { return 2 * radius_ + 1; }
    std::int64_t volume() const { return volume_; }
    std::int64_t axis_stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

    std::int32_t lo(int axis) const { return center_[axis] - radius_; }
    std::int32_t hi(int axis) const { return center_[axis] + radius_; }

    bool contains(const Point& p) const;
    std::int64_t index_of(const Point& p) const;  // throws if p is outside
    Point site_at(std::int64_t index) const;      // throws if index out of range

    // True when p lies in the box and some lattice neighbour of p does not.
    bool on_internal_boundary(const Point& p) const;

    BoxSpec translated(const Point& offset) const;

    friend bool operator==(const BoxSpec&, const BoxSpec&) = default;

private:
    int dim_;
    Point center_;
    std::int32_t radius_;
    std::int64_t volume_;
    std::array<std::int64_t, kMaxDim> stride_{1, 1, 1, 1};
};

// The site <-> index bijection of a box as a standalone value.
struct SiteIndexer {
    BoxSpec box;

    std::int64_t index_of(const Point& p) const { return box.index_of(p); }
    Point site_at(std::int64_t i) const { return box.site_at(i); }
};

enum class BoundarySide { internal, external };

// The 2*dim nearest neighbours of x, axis by axis, minus before plus.
std::vector<Point> neighbors(const Point& x, int dim);

// Boundary of a box relative to the ambient lattice Z^d:
//   internal: sites of the box adjacent to its complement
//   external: sites of the complement adjacent to the box
// Returned in ascending lexicographic order.
std::vector<Point> boundary(const BoxSpec& box, BoundarySide side);

// |internal boundary| of Lambda(radius) in dimension dim, closed form.
std::int64_t internal_boundary_size(int dim, std::int32_t radius);

// Lambda(n + l) \ Lambda(n), in Lambda(n+l) index order. Empty when l == 0.
std::vector<Point> annulus_sites(std::int32_t n, std::int32_t l, int dim);

// Iterates the sites of a box in index order while maintaining coordinates,
// so hot loops avoid div/mod per site.
class SiteCursor {
public:
    explicit SiteCursor(const BoxSpec& box);

    bool valid() const { return index_ < volume_; }
    std::int64_t index() const { return index_; }
    const Point& point() const { return point_; }
    void advance();

private:
    const BoxSpec* box_;
    std::int64_t index_ = 0;
    std::int64_t volume_;
    Point point_;
};

}  // namespace perc
