#include "perc/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace perc {

Point operator+(const Point& a, const Point& b) {
    Point r;
    for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
    return r;
}

Point operator-(const Point& a, const Point& b) {
    Point r;
    for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] - b[i];
    return r;
}

std::int64_t l1_distance(const Point& a, const Point& b) {
    std::int64_t d = 0;
    for (int i = 0; i < kMaxDim; ++i) d += std::abs(static_cast<std::int64_t>(a[i]) - b[i]);
    return d;
}

std::string to_string(const Point& p, int dim) {
    std::ostringstream out;
    for (int i = 0; i < dim; ++i) {
        if (i) out << ',';
        out << p[i];
    }
    return out.str();
}

Point point_from_string(const std::string& text, int dim) {
    Point p;
    std::istringstream in(text);
    for (int i = 0; i < dim; ++i) {
        std::string part;
        if (!std::getline(in, part, ',')) throw std::invalid_argument("point '" + text + "' has fewer than " + std::to_string(dim) + " coordinates");
        std::size_t pos = 0;
        p[i] = std::stoi(part, &pos);
        if (pos != part.size()) throw std::invalid_argument("bad coordinate '" + part + "'");
    }
    std::string rest;
    if (std::getline(in, rest, ',')) throw std::invalid_argument("point '" + text + "' has more than " + std::to_string(dim) + " coordinates");
    return p;
}

BoxSpec::BoxSpec(int dim, Point center, std::int32_t radius)
    : dim_(dim), center_(center), radius_(radius) {
    if (dim < kMinDim || dim > kMaxDim) throw std::invalid_argument("dimension must be in [2,4], got " + std::to_string(dim));
    if (radius < 0) throw std::invalid_argument("box radius must be >= 0");
    for (int i = dim; i < kMaxDim; ++i) {
        if (center[i] != 0) throw std::invalid_argument("center has nonzero coordinate beyond dimension");
    }
    for (int i = 0; i < dim; ++i) {
        if (std::abs(static_cast<std::int64_t>(center[i])) + radius >= kCoordLimit)
            throw std::invalid_argument("box exceeds the coordinate limit (keep n + l below 2^20)");
    }
    std::int64_t v = 1;
    const std::int64_t s = side();
    for (int i = 0; i < dim; ++i) {
        stride_[static_cast<std::size_t>(i)] = v;
        if (v > (std::int64_t{1} << 62) / s) throw std::invalid_argument("box volume overflows int64");
        v *= s;
    }
    volume_ = v;
}

BoxSpec BoxSpec::lambda(int dim, std::int32_t radius) { return BoxSpec(dim, Point{}, radius); }

bool BoxSpec::contains(const Point& p) const {
    for (int i = 0; i < dim_; ++i) {
        if (p[i] < lo(i) || p[i] > hi(i)) return false;
    }
    for (int i = dim_; i < kMaxDim; ++i) {
        if (p[i] != 0) return false;
    }
    return true;
}

std::int64_t BoxSpec::index_of(const Point& p) const {
    if (!contains(p)) throw std::out_of_range("site " + to_string(p, dim_) + " is not in the box");
    std::int64_t idx = 0;
    for (int i = 0; i < dim_; ++i) idx += (p[i] - lo(i)) * stride_[static_cast<std::size_t>(i)];
    return idx;
}

Point BoxSpec::site_at(std::int64_t index) const {
    if (index < 0 || index >= volume_) throw std::out_of_range("site index out of range");
    Point p;
    const std::int64_t s = side();
    for (int i = 0; i < dim_; ++i) {
        p[i] = static_cast<std::int32_t>(index % s) + lo(i);
        index /= s;
    }
    return p;
}

bool BoxSpec::on_internal_boundary(const Point& p) const {
    if (!contains(p)) return false;
    for (int i = 0; i < dim_; ++i) {
        if (p[i] == lo(i) || p[i] == hi(i)) return true;
    }
    return false;
}

BoxSpec BoxSpec::translated(const Point& offset) const { return BoxSpec(dim_, center_ + offset, radius_); }

std::vector<Point> neighbors(const Point& x, int dim) {
    if (dim < kMinDim || dim > kMaxDim) throw std::invalid_argument("dimension must be in [2,4]");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(2 * dim));
    for (int a = 0; a < dim; ++a) {
        Point m = x;
        m[a] -= 1;
        out.push_back(m);
        Point p = x;
        p[a] += 1;
        out.push_back(p);
    }
    return out;
}

std::vector<Point> boundary(const BoxSpec& box, BoundarySide side) {
    std::vector<Point> out;
    if (side == BoundarySide::internal) {
        for (SiteCursor it(box); it.valid(); it.advance()) {
            if (box.on_internal_boundary(it.point())) out.push_back(it.point());
        }
    } else {
        // The external boundary of a cube is the union of its 2*dim face
        // translates: one coordinate at lo-1 or hi+1, the others inside.
        for (int a = 0; a < box.dim(); ++a) {
            for (std::int32_t face : {box.lo(a) - 1, box.hi(a) + 1}) {
                BoxSpec faceBox = box;  // iterate the box, override axis a
                for (SiteCursor it(faceBox); it.valid(); it.advance()) {
                    Point p = it.point();
                    if (p[a] != box.lo(a)) continue;  // visit each face slice once
                    p[a] = face;
                    out.push_back(p);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t internal_boundary_size(int dim, std::int32_t radius) {
    if (radius == 0) return 1;
    std::int64_t full = 1, inner = 1;
    for (int i = 0; i < dim; ++i) {
        full *= 2 * static_cast<std::int64_t>(radius) + 1;
        inner *= 2 * static_cast<std::int64_t>(radius) - 1;
    }
    return full - inner;
}

std::vector<Point> annulus_sites(std::int32_t n, std::int32_t l, int dim) {
    if (n < 0 || l < 0) throw std::invalid_argument("annulus radii must be >= 0");
    const BoxSpec outer = BoxSpec::lambda(dim, n + l);
    const BoxSpec inner = BoxSpec::lambda(dim, n);
    std::vector<Point> out;
    if (l == 0) return out;
    out.reserve(static_cast<std::size_t>(outer.volume() - inner.volume()));
    for (SiteCursor it(outer); it.valid(); it.advance()) {
        if (!inner.contains(it.point())) out.push_back(it.point());
    }
    return out;
}

SiteCursor::SiteCursor(const BoxSpec& box) : box_(&box), volume_(box.volume()) {
    for (int i = 0; i < box.dim(); ++i) point_[i] = box.lo(i);
}

void SiteCursor::advance() {
    ++index_;
    for (int i = 0; i < box_->dim(); ++i) {
        if (point_[i] < box_->hi(i)) {
            ++point_[i];
            return;
        }
        point_[i] = box_->lo(i);
    }
    // past the end; index() already reports invalid
}

}  // namespace perc
