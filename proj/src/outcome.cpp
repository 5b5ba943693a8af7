#include "povm/outcome.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "povm/errors.hpp"

namespace povm {

OutcomeSpace OutcomeSpace::finite(std::size_t n) {
    if (n == 0) {
        throw InvalidInput("finite outcome space needs at least one label");
    }
    return {SpaceKind::Labels, n};
}

double wrap_angle(double radians) {
    if (!std::isfinite(radians)) {
        throw InvalidInput("angle must be finite");
    }
    double r = std::fmod(radians, kTwoPi);
    if (r < 0) {
        r += kTwoPi;
    }
    // fmod of a tiny negative number can round up to exactly 2pi
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

Angle make_angle(double radians) { return Angle{wrap_angle(radians)}; }

Direction make_direction(const Eigen::Vector3d &v, double tol) {
    if (!v.allFinite()) {
        throw InvalidInput("direction must be finite");
    }
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > tol) {
        throw InvalidInput("direction is not a unit vector (|n| = " + std::to_string(norm) + ")");
    }
    return v / norm;
}

bool lies_in(const OutcomePoint &point, const OutcomeSpace &space) {
    switch (space.kind) {
    case SpaceKind::Labels:
        return std::holds_alternative<Label>(point) && std::get<Label>(point).index < space.labels;
    case SpaceKind::Circle:
        if (const auto *a = std::get_if<Angle>(&point)) {
            return a->radians >= 0.0 && a->radians < kTwoPi;
        }
        return false;
    case SpaceKind::Sphere:
        if (const auto *n = std::get_if<Direction>(&point)) {
            return n->allFinite() && std::abs(n->norm() - 1.0) <= 1e-9;
        }
        return false;
    }
    return false;
}

bool same_point(const OutcomePoint &a, const OutcomePoint &b) {
    if (a.index() != b.index()) {
        return false;
    }
    if (const auto *n = std::get_if<Direction>(&a)) {
        return *n == std::get<Direction>(b);
    }
    if (const auto *l = std::get_if<Label>(&a)) {
        return *l == std::get<Label>(b);
    }
    return std::get<Angle>(a) == std::get<Angle>(b);
}

namespace {

// angle in [lo, lo + len) on the circle, comparing against the end point so
// that adjacent pieces sharing an end point never both claim it
bool in_range(double angle, double lo, double len) {
    if (len >= kTwoPi) {
        return true;
    }
    const double end = lo + len;
    if (end <= kTwoPi) {
        return angle >= lo && angle < end;
    }
    return angle >= lo || angle < end - kTwoPi;
}

} // namespace

bool Arc::contains(double angle) const { return in_range(angle, start, length); }

Arc make_arc(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
        throw InvalidInput("arc [a, b) needs finite a < b");
    }
    const double length = b - a;
    if (length > kTwoPi * (1 + 1e-15)) {
        throw InvalidInput("arc longer than the full circle");
    }
    return Arc{wrap_angle(a), std::min(length, kTwoPi)};
}

bool SpherePatch::contains(const Direction &n) const {
    const double z = n.dot(frame.col(2));
    if (z < z_lo) {
        return false;
    }
    if (z_hi < 1.0 && z >= z_hi) {
        return false;
    }
    if (full_azimuth()) {
        return true;
    }
    const double x = n.dot(frame.col(0));
    const double y = n.dot(frame.col(1));
    const double phi = (x == 0.0 && y == 0.0) ? 0.0 : wrap_angle(std::atan2(y, x));
    return in_range(phi, phi_lo, phi_len);
}

Eigen::Matrix3d frame_about(const Direction &axis) {
    const Direction e3 = axis.normalized();
    Eigen::Vector3d e1 = Eigen::Vector3d::UnitX();
    if (std::abs(e3.z()) < 1.0 - 1e-12) {
        // meridian direction pointing towards +z
        e1 = (Eigen::Vector3d::UnitZ() - e3.z() * e3).normalized();
    }
    Eigen::Matrix3d f;
    f.col(0) = e1;
    f.col(1) = e3.cross(e1);
    f.col(2) = e3;
    return f;
}

SpherePatch make_cap(const Direction &axis, double half_angle) {
    if (!(half_angle >= 0.0 && half_angle <= std::numbers::pi)) {
        throw InvalidInput("cap half-angle must lie in [0, pi]");
    }
    SpherePatch p;
    p.frame = frame_about(make_direction(axis));
    p.z_lo = half_angle >= std::numbers::pi ? -1.0 : std::cos(half_angle);
    if (std::abs(p.z_lo) < 1e-15) {
        p.z_lo = 0.0; // cos(pi/2) rounds to 6e-17; keep the hemisphere closed on the equator
    }
    p.z_hi = 1.0;
    return p;
}

SpherePatch make_zone_sector(double z_lo, double z_hi, double phi_lo, double phi_len) {
    if (!(z_lo >= -1.0 && z_lo < z_hi && z_hi <= 1.0)) {
        throw InvalidInput("zone needs -1 <= z_lo < z_hi <= 1");
    }
    if (!(phi_len > 0.0 && phi_len <= kTwoPi)) {
        throw InvalidInput("sector length must lie in (0, 2pi]");
    }
    SpherePatch p;
    p.z_lo = z_lo;
    p.z_hi = z_hi;
    p.phi_lo = wrap_angle(phi_lo);
    p.phi_len = phi_len;
    return p;
}

Region Region::whole(const OutcomeSpace &space) {
    Region r;
    r.space_ = space;
    r.complemented_ = true; // complement of the empty union
    return r;
}

Region Region::labels(std::size_t n, std::vector<std::size_t> members) {
    Region r;
    r.space_ = OutcomeSpace::finite(n);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty() && members.back() >= n) {
        throw InvalidInput("label outside the outcome space");
    }
    r.labels_ = std::move(members);
    return r;
}

Region Region::arcs(std::vector<Arc> pieces) {
    // Split wrapping arcs into pieces of [0, 2pi), merge, then re-join a
    // piece touching 2pi with one starting at 0.
    std::vector<std::pair<double, double>> flat;
    for (const auto &a : pieces) {
        if (!(a.length > 0.0 && a.length <= kTwoPi) || !(a.start >= 0.0 && a.start < kTwoPi)) {
            throw InvalidInput("arc not in canonical form");
        }
        const double end = a.start + a.length;
        if (end <= kTwoPi) {
            flat.emplace_back(a.start, end);
        } else {
            flat.emplace_back(a.start, kTwoPi);
            flat.emplace_back(0.0, end - kTwoPi);
        }
    }
    std::sort(flat.begin(), flat.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto &iv : flat) {
        if (!merged.empty() && iv.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, iv.second);
        } else {
            merged.push_back(iv);
        }
    }
    Region r;
    r.space_ = OutcomeSpace::circle();
    if (merged.size() == 1 && merged.front().first == 0.0 && merged.front().second >= kTwoPi) {
        r.arcs_.push_back(Arc{0.0, kTwoPi});
        return r;
    }
    if (merged.size() > 1 && merged.front().first == 0.0 && merged.back().second >= kTwoPi) {
        const auto head = merged.front();
        merged.erase(merged.begin());
        merged.back().second += head.second;
    }
    for (const auto &iv : merged) {
        r.arcs_.push_back(Arc{iv.first, iv.second - iv.first});
    }
    std::sort(r.arcs_.begin(), r.arcs_.end(), [](const Arc &a, const Arc &b) { return a.start < b.start; });
    return r;
}

Region Region::patches(std::vector<SpherePatch> pieces) {
    for (const auto &p : pieces) {
        const Eigen::Matrix3d g = p.frame.transpose() * p.frame;
        if (!g.isApprox(Eigen::Matrix3d::Identity(), 1e-9)) {
            throw InvalidInput("patch frame is not orthonormal");
        }
        const bool point_cap = p.z_lo == 1.0 && p.z_hi == 1.0;
        if (!(p.z_lo >= -1.0 && (p.z_lo < p.z_hi || point_cap) && p.z_hi <= 1.0)) {
            throw InvalidInput("patch needs -1 <= z_lo < z_hi <= 1");
        }
        if (!(p.phi_len > 0.0 && p.phi_len <= kTwoPi) || !(p.phi_lo >= 0.0 && p.phi_lo < kTwoPi)) {
            throw InvalidInput("patch azimuth range not canonical");
        }
    }
    auto key = [](const SpherePatch &p) {
        return std::make_tuple(p.frame(0, 2), p.frame(1, 2), p.frame(2, 2), p.z_lo, p.z_hi, p.phi_lo, p.phi_len,
                               p.frame(0, 0), p.frame(1, 0), p.frame(2, 0));
    };
    std::sort(pieces.begin(), pieces.end(),
              [&](const SpherePatch &a, const SpherePatch &b) { return key(a) < key(b); });
    Region r;
    r.space_ = OutcomeSpace::sphere();
    r.patches_ = std::move(pieces);
    return r;
}

Region Region::complement() const {
    Region r = *this;
    r.complemented_ = !complemented_;
    return r;
}

bool Region::contains(const OutcomePoint &point) const {
    if (!lies_in(point, space_)) {
        return false;
    }
    bool inside = false;
    switch (space_.kind) {
    case SpaceKind::Labels:
        inside = std::binary_search(labels_.begin(), labels_.end(), std::get<Label>(point).index);
        break;
    case SpaceKind::Circle: {
        const double phi = std::get<Angle>(point).radians;
        inside = std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc &a) { return a.contains(phi); });
        break;
    }
    case SpaceKind::Sphere: {
        const auto &n = std::get<Direction>(point);
        inside = std::any_of(patches_.begin(), patches_.end(), [&](const SpherePatch &p) { return p.contains(n); });
        break;
    }
    }
    return inside != complemented_;
}

std::vector<Region> sphere_bins(std::size_t zones, std::size_t sectors) {
    if (zones == 0 || sectors == 0) {
        throw InvalidInput("sphere binning needs at least one zone and one sector");
    }
    std::vector<Region> bins;
    bins.reserve(zones * sectors);
    const double dz = 2.0 / static_cast<double>(zones);
    const double dphi = kTwoPi / static_cast<double>(sectors);
    for (std::size_t i = 0; i < zones; ++i) {
        const double lo = -1.0 + dz * static_cast<double>(i);
        const double hi = (i + 1 == zones) ? 1.0 : -1.0 + dz * static_cast<double>(i + 1);
        for (std::size_t j = 0; j < sectors; ++j) {
            const double start = dphi * static_cast<double>(j);
            const double end = (j + 1 == sectors) ? kTwoPi : dphi * static_cast<double>(j + 1);
            bins.push_back(Region::patches({make_zone_sector(lo, hi, start, end - start)}));
        }
    }
    return bins;
}

std::vector<Region> circle_bins(std::size_t count) {
    if (count == 0) {
        throw InvalidInput("circle binning needs at least one arc");
    }
    std::vector<Region> bins;
    const double width = kTwoPi / static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double start = width * static_cast<double>(j);
        const double end = (j + 1 == count) ? kTwoPi : width * static_cast<double>(j + 1);
        bins.push_back(Region::arcs({Arc{start, end - start}}));
    }
    return bins;
}

} // namespace povm
