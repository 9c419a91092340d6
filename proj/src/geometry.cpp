#include "sirsn/geometry.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sirsn {

double reduce_angle(double a) {
    double m = std::fmod(a, kPi);
    if (m < 0) m += kPi;
    if (m >= kPi) m = 0.0;
    return m;
}

Line Line::from_normal(double phi, double r) {
    double m = std::fmod(phi, 2 * kPi);
    if (m < 0) m += 2 * kPi;
    if (m >= kPi) {
        m -= kPi;
        r = -r;
    }
    if (m >= kPi) m = 0.0;
    return Line{m, r};
}

Line Line::through(Vec2 a, Vec2 b) {
    Vec2 d = b - a;
    double len = norm(d);
    if (len == 0.0) throw std::invalid_argument("Line::through: coincident points");
    d = d / len;
    // direction (-sin phi, cos phi) => normal (d.y, -d.x)
    double phi = std::atan2(-d.x, d.y);
    Line l = from_normal(phi, 0.0);
    l.r = dot(l.normal(), a);
    return l;
}

bool same_direction(const Line& a, const Line& b) {
    double d = std::abs(a.phi - b.phi);
    return d <= kAngleTol || kPi - d <= kAngleTol;
}

std::optional<Vec2> intersect(const Line& a, const Line& b) {
    double det = std::sin(b.phi - a.phi);
    if (std::abs(det) <= kAngleTol) return std::nullopt;
    double ca = std::cos(a.phi), sa = std::sin(a.phi);
    double cb = std::cos(b.phi), sb = std::sin(b.phi);
    // [ca sa; cb sb] x = [ra; rb]
    double den = ca * sb - sa * cb;
    return Vec2{(a.r * sb - b.r * sa) / den, (ca * b.r - cb * a.r) / den};
}

namespace {

double polygon_perimeter(const Polygon& p) {
    double s = 0.0;
    const auto& v = p.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) s += dist(v[i], v[(i + 1) % v.size()]);
    return s;
}

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

// Indices of strictly extreme points of the hull, counter-clockwise.
std::vector<int> hull_indices(const std::array<Vec2, 4>& pts) {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) {
        return pts[i].x < pts[j].x || (pts[i].x == pts[j].x && pts[i].y < pts[j].y);
    });
    std::vector<int> h(8);
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        while (k >= 2 && orient(pts[h[k - 2]], pts[h[k - 1]], pts[idx[i]]) <= 0) --k;
        h[k++] = idx[i];
    }
    for (int i = 2, t = k + 1; i >= 0; --i) {
        while (k >= t && orient(pts[h[k - 2]], pts[h[k - 1]], pts[idx[i]]) <= 0) --k;
        h[k++] = idx[i];
    }
    h.resize(k > 1 ? k - 1 : k);
    return h;
}

}  // namespace

void validate(const ConvexBody& k) {
    if (auto d = std::get_if<Disk>(&k)) {
        if (!(d->radius > 0) || !std::isfinite(d->radius))
            throw std::invalid_argument("disk radius must be positive");
    } else if (auto p = std::get_if<Polygon>(&k)) {
        const auto& v = p->vertices;
        std::size_t n = v.size();
        for (std::size_t i = 0; i < n && n >= 3; ++i) {
            double o = orient(v[i], v[(i + 1) % n], v[(i + 2) % n]);
            if (o < -1e-12 * (1.0 + norm(v[i]) * norm(v[i])))
                throw std::invalid_argument("polygon must be convex and counter-clockwise");
        }
    } else {
        const auto& s = std::get<Segment>(k);
        if (s.a == s.b) throw std::invalid_argument("segment endpoints must be distinct");
    }
}

double perimeter(const ConvexBody& k) {
    if (auto d = std::get_if<Disk>(&k)) return 2 * kPi * d->radius;
    if (auto p = std::get_if<Polygon>(&k)) return polygon_perimeter(*p);
    return 2 * std::get<Segment>(k).length();
}

bool hits(const Line& l, const ConvexBody& k) {
    if (auto d = std::get_if<Disk>(&k)) return l.distance(d->center) <= d->radius;
    auto straddles = [&](const std::vector<Vec2>& pts) {
        bool neg = false, pos = false;
        for (auto q : pts) {
            double s = l.signed_distance(q);
            if (s == 0) return true;
            (s < 0 ? neg : pos) = true;
        }
        return neg && pos;
    };
    if (auto p = std::get_if<Polygon>(&k)) return straddles(p->vertices);
    const auto& s = std::get<Segment>(k);
    return straddles({s.a, s.b});
}

std::optional<std::pair<double, double>> chord(const Line& l, const Disk& d) {
    double h = l.signed_distance(d.center);
    double rr = d.radius * d.radius - h * h;
    if (rr < 0) {
        if (std::abs(h) > d.radius * (1 + 1e-12)) return std::nullopt;
        rr = 0;
    }
    double half = std::sqrt(rr);
    double t = l.param(d.center);
    return std::make_pair(t - half, t + half);
}

double hitting_measure(const ConvexBody& k) {
    if (auto d = std::get_if<Disk>(&k)) {
        if (!(d->radius > 0)) throw std::invalid_argument("disk radius must be positive");
        return kPi * d->radius;
    }
    if (std::holds_alternative<Polygon>(k)) validate(k);
    return 0.5 * perimeter(k);
}

double measure_lines_meeting_two_segments(const Segment& s1, const Segment& s2) {
    const Vec2 p = s1.a, q = s1.b, s = s2.a, t = s2.b;
    if (segments_intersect(p, q, s, t))
        throw std::domain_error("measure_lines_meeting_two_segments: segments intersect");
    if (p == q || s == t) return 0.0;

    const double d_pq = dist(p, q), d_st = dist(s, t);
    const double d_ps = dist(p, s), d_qt = dist(q, t);
    const double d_pt = dist(p, t), d_qs = dist(q, s);
    const double d0 = d_pq + d_st, d1 = d_ps + d_qt, d2 = d_pt + d_qs;

    const std::array<Vec2, 4> pts{p, q, s, t};
    auto hull = hull_indices(pts);
    double result = 0.0;
    if (hull.size() == 4) {
        // opposite corners of the hull are the crossing diagonals
        int opp_p = -1;
        for (int i = 0; i < 4; ++i)
            if (hull[i] == 0) opp_p = hull[(i + 2) % 4];
        if (opp_p == 3)
            result = 0.5 * (d2 - d1);  // p-t and q-s cross
        else if (opp_p == 2)
            result = 0.5 * (d1 - d2);  // p-s and q-t cross
        else
            throw std::domain_error("measure_lines_meeting_two_segments: segments intersect");
    } else if (hull.size() == 3) {
        int inner = 0;
        while (std::find(hull.begin(), hull.end(), inner) != hull.end()) ++inner;
        const Vec2 a = pts[hull[0]], b = pts[hull[1]], c = pts[hull[2]], x = pts[inner];
        double per = dist(a, b) + dist(b, c) + dist(c, a);
        double singletons = per - (dist(x, a) + dist(x, b) + dist(x, c));
        result = 0.5 * (d0 - singletons);
    }
    return std::max(0.0, result);
}

double measure_lines_meeting_two_disks(Vec2 c1, Vec2 c2, double rho) {
    if (rho < 0) throw std::invalid_argument("measure_lines_meeting_two_disks: negative radius");
    const double d = dist(c1, c2);
    if (d <= 2 * rho) throw std::domain_error("measure_lines_meeting_two_disks: disks overlap");
    if (rho == 0) return 0.0;
    // Offsets of the two disks' hitting intervals differ by d|cos(u)|, u the normal angle
    // measured from c2 - c1; integrate half the overlap length over one period.
    auto f = [&](double u) { return 0.5 * std::max(0.0, 2 * rho - d * std::abs(std::cos(u))); };
    const double u0 = std::acos(2 * rho / d);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double lo = GK::integrate(f, u0, kPi / 2, 15, 1e-12);
    double hi = GK::integrate(f, kPi / 2, kPi - u0, 15, 1e-12);
    return lo + hi;
}

double cost_index(double v, double theta, double w) {
    if (!(v > 0) || !(w > 0)) throw std::invalid_argument("cost_index: speeds must be positive");
    if (!(theta > 0 && theta < kPi)) throw std::domain_error("cost_index: theta must lie in (0, pi)");
    return 1.0 / (std::sin(theta) * v) - std::cos(theta) / (std::sin(theta) * w);
}

double cost_intensity_density(double c, double theta, double w, double gamma) {
    if (!(gamma > 2)) throw std::invalid_argument("cost_intensity_density: gamma must exceed 2");
    double s = std::sin(theta);
    double base = c * s + std::cos(theta) / w;
    if (!(base > 0) || !(s > 0)) return 0.0;
    return 0.5 * (gamma - 1) * s * std::pow(base, gamma - 2);
}

}  // namespace sirsn
