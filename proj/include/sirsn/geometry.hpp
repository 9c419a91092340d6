#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

namespace sirsn {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kAngleTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Hesse normal form: {x : x.(cos phi, sin phi) = r}, phi in [0, pi).
struct Line {
    double phi = 0.0;
    double r = 0.0;

    static Line from_normal(double phi, double r);
    static Line through(Vec2 a, Vec2 b);

    Vec2 normal() const { return {std::cos(phi), std::sin(phi)}; }
    Vec2 direction() const { return {-std::sin(phi), std::cos(phi)}; }
    double signed_distance(Vec2 p) const { return dot(normal(), p) - r; }
    double distance(Vec2 p) const { return std::abs(signed_distance(p)); }
    // arclength coordinate along direction(), origin at the foot of the origin
    double param(Vec2 p) const { return dot(direction(), p); }
    Vec2 point_at(double t) const { return normal() * r + direction() * t; }
    Vec2 project(Vec2 p) const { return point_at(param(p)); }
};

// Reduce an angle into [0, pi).
double reduce_angle(double a);
bool same_direction(const Line& a, const Line& b);
std::optional<Vec2> intersect(const Line& a, const Line& b);

struct Disk {
    Vec2 center;
    double radius = 1.0;
};

struct Polygon {
    std::vector<Vec2> vertices;  // convex, counter-clockwise
};

struct Segment {
    Vec2 a;
    Vec2 b;
    double length() const { return dist(a, b); }
};

using ConvexBody = std::variant<Disk, Polygon, Segment>;

// Throws std::invalid_argument for a body violating its invariants.
void validate(const ConvexBody& k);
double perimeter(const ConvexBody& k);
bool hits(const Line& l, const ConvexBody& k);

// Chord of a line through a disk as an arclength interval; nullopt if missed.
std::optional<std::pair<double, double>> chord(const Line& l, const Disk& d);

double hitting_measure(const ConvexBody& k);
double measure_lines_meeting_two_segments(const Segment& s1, const Segment& s2);
double measure_lines_meeting_two_disks(Vec2 c1, Vec2 c2, double rho);

double cost_index(double v, double theta, double w);
double cost_intensity_density(double c, double theta, double w, double gamma);

}  // namespace sirsn
