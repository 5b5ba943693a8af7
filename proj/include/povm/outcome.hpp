#pragma once

// Outcome spaces (finite label sets, the circle, the 2-sphere), outcome
// points, and regions built from label sets, half-open arcs and spherical
// patches.

#include <cstddef>
#include <numbers>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace povm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class SpaceKind { Labels, Circle, Sphere };

struct OutcomeSpace {
    SpaceKind kind = SpaceKind::Labels;
    std::size_t labels = 1; ///< only meaningful for SpaceKind::Labels

    static OutcomeSpace finite(std::size_t n);
    static OutcomeSpace circle() { return {SpaceKind::Circle, 0}; }
    static OutcomeSpace sphere() { return {SpaceKind::Sphere, 0}; }

    bool operator==(const OutcomeSpace &) const = default;
};

struct Label {
    std::size_t index = 0;
    bool operator==(const Label &) const = default;
};

/// Angle in radians, kept in [0, 2pi).
struct Angle {
    double radians = 0.0;
    bool operator==(const Angle &) const = default;
};

using Direction = Eigen::Vector3d;

using OutcomePoint = std::variant<Label, Angle, Direction>;

double wrap_angle(double radians);
Angle make_angle(double radians);

/// Normalizes `v`; throws InvalidInput if | |v| - 1 | > tol.
Direction make_direction(const Eigen::Vector3d &v, double tol = 1e-6);

bool lies_in(const OutcomePoint &point, const OutcomeSpace &space);

/// Exact equality (same alternative, bitwise-equal coordinates).
bool same_point(const OutcomePoint &a, const OutcomePoint &b);

/// Half-open arc [start, start + length) on the circle.
struct Arc {
    double start = 0.0;  ///< in [0, 2pi)
    double length = 0.0; ///< in (0, 2pi]

    [[nodiscard]] bool contains(double angle) const;
    bool operator==(const Arc &) const = default;
};

/// Arc [a, b) for any reals a < b with b - a <= 2pi.
Arc make_arc(double a, double b);

/// { n : z_lo <= n.e3 < z_hi, azimuth(n) in [phi_lo, phi_lo + phi_len) }
/// in the orthonormal frame (e1, e2, e3) stored as the columns of `frame`.
/// z_hi >= 1 closes the upper end, so caps are closed sets. Azimuth is
/// measured from e1 towards e2 and is taken as 0 on the e3 axis.
struct SpherePatch {
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
    double z_lo = -1.0;
    double z_hi = 1.0;
    double phi_lo = 0.0;
    double phi_len = kTwoPi;

    [[nodiscard]] bool contains(const Direction &n) const;
    [[nodiscard]] bool full_azimuth() const { return phi_len >= kTwoPi; }
    [[nodiscard]] double area() const { return (z_hi - z_lo) * phi_len; }
};

/// Right-handed frame with the given unit axis as e3 (deterministic choice of e1).
Eigen::Matrix3d frame_about(const Direction &axis);

/// Closed cap { n : n.axis >= cos(half_angle) }, half_angle in [0, pi].
SpherePatch make_cap(const Direction &axis, double half_angle);

/// Zone-sector in the standard frame: cos(theta) in [z_lo, z_hi), phi in [phi_lo, phi_lo + phi_len).
SpherePatch make_zone_sector(double z_lo, double z_hi, double phi_lo, double phi_len);

/// A subset B of an outcome space: a finite union of primitive pieces,
/// optionally complemented. Arc unions are merged into disjoint canonical
/// form; sphere patches are assumed pairwise disjoint up to measure zero when
/// continuous probabilities are computed.
class Region {
  public:
    static Region whole(const OutcomeSpace &space);
    static Region labels(std::size_t n, std::vector<std::size_t> members);
    static Region arcs(std::vector<Arc> pieces);
    static Region arc(double a, double b) { return arcs({make_arc(a, b)}); }
    static Region patches(std::vector<SpherePatch> pieces);
    static Region cap(const Direction &axis, double half_angle) { return patches({make_cap(axis, half_angle)}); }

    [[nodiscard]] Region complement() const;

    [[nodiscard]] bool contains(const OutcomePoint &point) const;

    [[nodiscard]] const OutcomeSpace &space() const { return space_; }
    [[nodiscard]] bool complemented() const { return complemented_; }
    [[nodiscard]] const std::vector<std::size_t> &label_set() const { return labels_; }
    [[nodiscard]] const std::vector<Arc> &arc_list() const { return arcs_; }
    [[nodiscard]] const std::vector<SpherePatch> &patch_list() const { return patches_; }

  private:
    OutcomeSpace space_;
    bool complemented_ = false;
    std::vector<std::size_t> labels_;
    std::vector<Arc> arcs_;
    std::vector<SpherePatch> patches_;
};

/// `zones` equal-area latitude bands times `sectors` azimuthal sectors.
/// The default 2 x 6 gives 12 equal-area bins.
std::vector<Region> sphere_bins(std::size_t zones = 2, std::size_t sectors = 6);

/// `count` equal arcs starting at 0.
std::vector<Region> circle_bins(std::size_t count = 16);

} // namespace povm
