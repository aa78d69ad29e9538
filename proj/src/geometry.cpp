#include "nlvis/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nlvis/random.hpp"

namespace nlvis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void clip_add(IntervalSet& out, double lo, double hi) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (lo <= hi) out.add(lo, hi);
}

// {t in [0,1] : A t^2 + B t + C <= 0}
IntervalSet quadratic_nonpositive(double A, double B, double C) {
    IntervalSet out;
    if (A == 0.0) {
        if (B == 0.0) {
            if (C <= 0.0) out.add(0.0, 1.0);
            return out;
        }
        double r = -C / B;
        if (B > 0.0)
            clip_add(out, -kInf, r);
        else
            clip_add(out, r, kInf);
        return out;
    }
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) {
        if (A < 0.0) out.add(0.0, 1.0);
        return out;
    }
    double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    double r1 = q / A;
    double r2 = q != 0.0 ? C / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    if (A > 0.0) {
        clip_add(out, r1, r2);
    } else {
        clip_add(out, -kInf, r1);
        clip_add(out, r2, kInf);
    }
    return out;
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet out;
    for (int i = 0; i < a.count; ++i) {
        for (int j = 0; j < b.count; ++j) {
            double lo = std::max(a.items[i][0], b.items[j][0]);
            double hi = std::min(a.items[i][1], b.items[j][1]);
            if (lo <= hi) {
                if (out.count == 2) throw std::logic_error("interval intersection overflow");
                out.add(lo, hi);
            }
        }
    }
    return out;
}

IntervalSet linear_nonpositive(double B, double C) { return quadratic_nonpositive(0.0, B, C); }

// Distance from p to the curve y = a (t^2 - 1) + c, a != 0.
double parabola_distance(double a, double c, Vec2 p) {
    // Stationary points solve 2a^2 t^3 + (1 + 2a k) t - px = 0.
    double k = c - a - p.y;
    double c3 = 2.0 * a * a;
    double c1 = 1.0 + 2.0 * a * k;
    double P = c1 / c3;
    double Q = -p.x / c3;
    std::array<double, 3> roots{};
    int n = 0;
    double D = 0.25 * Q * Q + P * P * P / 27.0;
    if (D >= 0.0) {
        double s = std::sqrt(D);
        roots[n++] = std::cbrt(-0.5 * Q + s) + std::cbrt(-0.5 * Q - s);
    } else {
        double m = 2.0 * std::sqrt(-P / 3.0);
        double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
        double theta = std::acos(arg) / 3.0;
        for (int j = 0; j < 3; ++j) roots[n++] = m * std::cos(theta - 2.0 * M_PI * j / 3.0);
    }
    double best = kInf;
    for (int j = 0; j < n; ++j) {
        double t = roots[j];
        for (int it = 0; it < 2; ++it) {
            double f = c3 * t * t * t + c1 * t - p.x;
            double df = 3.0 * c3 * t * t + c1;
            if (df != 0.0) t -= f / df;
        }
        double dx = t - p.x;
        double dy = a * (t * t - 1.0) + c - p.y;
        best = std::min(best, std::hypot(dx, dy));
    }
    return best;
}

struct InsideVisitor {
    Vec2 x;
    bool operator()(const HalfSpace& h) const { return dot(h.normal, x) < h.offset; }
    bool operator()(const Ball& b) const {
        Vec2 d = x - b.center;
        return dot(d, d) < b.radius * b.radius;
    }
    bool operator()(const Box& b) const {
        return x.x > b.lo.x && x.x < b.hi.x && x.y > b.lo.y && x.y < b.hi.y;
    }
    bool operator()(const ParabolicTube& t) const {
        return std::abs(x.y - t.amplitude * (x.x * x.x - 1.0)) < t.radius;
    }
};

struct SignedDistanceVisitor {
    Vec2 x;
    double operator()(const HalfSpace& h) const { return h.offset - dot(h.normal, x); }
    double operator()(const Ball& b) const { return b.radius - norm(x - b.center); }
    double operator()(const Box& b) const {
        double ox = std::max({b.lo.x - x.x, 0.0, x.x - b.hi.x});
        double oy = std::max({b.lo.y - x.y, 0.0, x.y - b.hi.y});
        if (ox > 0.0 || oy > 0.0) return -std::hypot(ox, oy);
        return std::min({x.x - b.lo.x, b.hi.x - x.x, x.y - b.lo.y, b.hi.y - x.y});
    }
    double operator()(const ParabolicTube& t) const {
        double g = x.y - t.amplitude * (x.x * x.x - 1.0);
        if (t.amplitude == 0.0) return t.radius - std::abs(g);
        double d = std::min(parabola_distance(t.amplitude, t.radius, x),
                            parabola_distance(t.amplitude, -t.radius, x));
        return std::abs(g) < t.radius ? d : -d;
    }
};

struct SegmentVisitor {
    Vec2 a;
    Vec2 d;
    IntervalSet operator()(const HalfSpace& h) const {
        return linear_nonpositive(dot(h.normal, d), dot(h.normal, a) - h.offset);
    }
    IntervalSet operator()(const Ball& b) const {
        Vec2 o = a - b.center;
        return quadratic_nonpositive(dot(d, d), 2.0 * dot(d, o), dot(o, o) - b.radius * b.radius);
    }
    IntervalSet operator()(const Box& b) const {
        IntervalSet s = quadratic_nonpositive(0.0, 0.0, -1.0);
        s = intersect(s, linear_nonpositive(-d.x, b.lo.x - a.x));
        s = intersect(s, linear_nonpositive(d.x, a.x - b.hi.x));
        s = intersect(s, linear_nonpositive(-d.y, b.lo.y - a.y));
        s = intersect(s, linear_nonpositive(d.y, a.y - b.hi.y));
        return s;
    }
    IntervalSet operator()(const ParabolicTube& t) const {
        // g(t) = y(t) - amp (x(t)^2 - 1) is quadratic in t; need |g| <= radius.
        double A = -t.amplitude * d.x * d.x;
        double B = d.y - 2.0 * t.amplitude * a.x * d.x;
        double C = a.y - t.amplitude * (a.x * a.x - 1.0);
        IntervalSet upper = quadratic_nonpositive(A, B, C - t.radius);
        IntervalSet lower = quadratic_nonpositive(-A, -B, -C - t.radius);
        return intersect(upper, lower);
    }
};

struct BoundsVisitor {
    Box operator()(const HalfSpace& h) const {
        Box b{{-kInf, -kInf}, {kInf, kInf}};
        if (h.normal.y == 0.0) {
            if (h.normal.x > 0.0) b.hi.x = h.offset / h.normal.x;
            if (h.normal.x < 0.0) b.lo.x = h.offset / h.normal.x;
        } else if (h.normal.x == 0.0) {
            if (h.normal.y > 0.0) b.hi.y = h.offset / h.normal.y;
            if (h.normal.y < 0.0) b.lo.y = h.offset / h.normal.y;
        }
        return b;
    }
    Box operator()(const Ball& b) const {
        return {{b.center.x - b.radius, b.center.y - b.radius},
                {b.center.x + b.radius, b.center.y + b.radius}};
    }
    Box operator()(const Box& b) const { return b; }
    Box operator()(const ParabolicTube& t) const {
        if (t.amplitude == 0.0) return {{-kInf, -t.radius}, {kInf, t.radius}};
        return {{-kInf, -kInf}, {kInf, kInf}};
    }
};

void validate(const Primitive& k) {
    if (const auto* b = std::get_if<Ball>(&k); b && !(b->radius > 0.0))
        throw std::invalid_argument("ball radius must be positive");
    if (const auto* b = std::get_if<Box>(&k); b && !(b->lo.x < b->hi.x && b->lo.y < b->hi.y))
        throw std::invalid_argument("box requires lo < hi componentwise");
    if (const auto* t = std::get_if<ParabolicTube>(&k); t && !(t->radius > 0.0))
        throw std::invalid_argument("tube radius must be positive");
}

}  // namespace

HalfSpace make_halfspace(Vec2 normal, double offset) {
    double n = norm(normal);
    if (!(n > 0.0)) throw std::invalid_argument("half-space normal must be nonzero");
    return {normal * (1.0 / n), offset / n};
}

bool inside(const Primitive& k, Vec2 x) { return std::visit(InsideVisitor{x}, k); }

double signed_distance(const Primitive& k, Vec2 x) {
    return std::visit(SignedDistanceVisitor{x}, k);
}

IntervalSet segment_intervals(const Primitive& k, Vec2 a, Vec2 b) {
    return std::visit(SegmentVisitor{a, b - a}, k);
}

Box primitive_bounds(const Primitive& k) { return std::visit(BoundsVisitor{}, k); }

Box DomainSpec::bounds() const {
    if (primitives.empty()) throw std::invalid_argument("domain has no primitives");
    Box b{{kInf, kInf}, {-kInf, -kInf}};
    for (const auto& k : primitives) {
        Box pb = primitive_bounds(k);
        b.lo.x = std::min(b.lo.x, pb.lo.x);
        b.lo.y = std::min(b.lo.y, pb.lo.y);
        b.hi.x = std::max(b.hi.x, pb.hi.x);
        b.hi.y = std::max(b.hi.y, pb.hi.y);
    }
    for (const auto& c : clips) {
        b.lo.x = std::max(b.lo.x, c.center.x - c.radius);
        b.lo.y = std::max(b.lo.y, c.center.y - c.radius);
        b.hi.x = std::min(b.hi.x, c.center.x + c.radius);
        b.hi.y = std::min(b.hi.y, c.center.y + c.radius);
    }
    if (!std::isfinite(b.lo.x) || !std::isfinite(b.lo.y) || !std::isfinite(b.hi.x) ||
        !std::isfinite(b.hi.y))
        throw std::invalid_argument("domain '" + name + "' is unbounded; clip it first");
    return b;
}

bool contains(const DomainSpec& d, Vec2 x) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw std::invalid_argument("non-finite point");
    for (const auto& c : d.clips)
        if (!(dot(x - c.center, x - c.center) < c.radius * c.radius)) return false;
    for (const auto& h : d.holes)
        if (dot(x - h.center, x - h.center) <= h.radius * h.radius) return false;
    for (const auto& k : d.primitives)
        if (inside(k, x)) return true;
    return false;
}

bool segment_inside_unchecked(const DomainSpec& d, Vec2 x, Vec2 y) {
    for (const auto& h : d.holes) {
        IntervalSet s = segment_intervals(h, x, y);
        for (int i = 0; i < s.count; ++i)
            if (s.items[i][1] - s.items[i][0] > kGeomTol) return false;
    }
    for (const auto& c : d.clips) {
        IntervalSet s = segment_intervals(c, x, y);
        if (s.count != 1 || s.items[0][0] > kGeomTol || s.items[0][1] < 1.0 - kGeomTol) return false;
    }

    thread_local std::vector<std::array<double, 2>> buf;
    buf.clear();
    for (const auto& k : d.primitives) {
        IntervalSet s = segment_intervals(k, x, y);
        for (int i = 0; i < s.count; ++i) {
            if (s.items[i][0] <= kGeomTol && s.items[i][1] >= 1.0 - kGeomTol) return true;
            buf.push_back(s.items[i]);
        }
    }
    std::sort(buf.begin(), buf.end());
    double reach = 0.0;
    for (const auto& iv : buf) {
        if (iv[0] > reach + kGeomTol) return false;
        reach = std::max(reach, iv[1]);
        if (reach >= 1.0 - kGeomTol) return true;
    }
    return reach >= 1.0 - kGeomTol;
}

bool segment_inside(const DomainSpec& d, Vec2 x, Vec2 y) {
    if (!contains(d, x) || !contains(d, y))
        throw std::invalid_argument("segment endpoint outside the domain");
    return segment_inside_unchecked(d, x, y);
}

double boundary_distance(const DomainSpec& d, Vec2 x) {
    if (!contains(d, x)) throw std::invalid_argument("boundary_distance: point outside the domain");
    double delta = -kInf;
    for (const auto& k : d.primitives) delta = std::max(delta, signed_distance(k, x));
    for (const auto& h : d.holes) delta = std::min(delta, norm(x - h.center) - h.radius);
    for (const auto& c : d.clips) delta = std::min(delta, c.radius - norm(x - c.center));
    return delta;
}

DomainSpec make_dumbbell(DumbbellVariant variant, double tube_radius) {
    if (!(tube_radius > 0.0)) throw std::invalid_argument("tube radius must be positive");
    DomainSpec d;
    double amplitude = variant == DumbbellVariant::Straight ? 0.0 : 2.0;
    d.name = variant == DumbbellVariant::Straight ? "straight-dumbbell" : "curved-dumbbell";
    d.primitives = {make_halfspace({1.0, 0.0}, -1.0), ParabolicTube{amplitude, tube_radius},
                    make_halfspace({-1.0, 0.0}, -1.0)};
    DumbbellMeta meta;
    meta.minus = 0;
    meta.corridor = 1;
    meta.plus = 2;
    meta.gamma_star = Box{{-1.0, -tube_radius - 2.0}, {1.0, tube_radius}};
    if (variant == DumbbellVariant::Straight) meta.gamma_tilde = ParabolicTube{0.0, tube_radius};
    meta.anchor = {0.0, 0.0};
    meta.tube_radius = tube_radius;
    d.dumbbell = meta;
    return d;
}

DomainSpec make_box(Vec2 lo, Vec2 hi) {
    Primitive b = Box{lo, hi};
    validate(b);
    DomainSpec d;
    d.name = "box";
    d.primitives = {b};
    return d;
}

DomainSpec make_ball(Vec2 center, double radius) {
    Primitive b = Ball{center, radius};
    validate(b);
    DomainSpec d;
    d.name = "ball";
    d.primitives = {b};
    return d;
}

DomainSpec make_annulus(double r_in, double r_out) {
    if (!(r_in > 0.0 && r_in < r_out)) throw std::invalid_argument("annulus needs 0 < r_in < r_out");
    DomainSpec d;
    d.name = "annulus";
    d.primitives = {Ball{{0.0, 0.0}, r_out}};
    d.holes = {Ball{{0.0, 0.0}, r_in}};
    return d;
}

DomainSpec clip_ball(const DomainSpec& d, Vec2 x0, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("clip radius must be positive");
    DomainSpec out = d;
    out.clips.push_back(Ball{x0, R});
    return out;
}

namespace {

double parse_number(std::string_view s, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::invalid_argument("invalid number '" + std::string(s) + "' in " +
                                    std::string(what));
    return v;
}

std::vector<double> parse_numbers(std::string_view s, std::string_view what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string_view::npos) comma = s.size();
        out.push_back(parse_number(s.substr(start, comma - start), what));
        start = comma + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string primitive_record(const Primitive& k) {
    std::ostringstream os;
    if (const auto* h = std::get_if<HalfSpace>(&k))
        os << "halfspace nx=" << fmt(h->normal.x) << " ny=" << fmt(h->normal.y)
           << " offset=" << fmt(h->offset);
    else if (const auto* b = std::get_if<Ball>(&k))
        os << "ball cx=" << fmt(b->center.x) << " cy=" << fmt(b->center.y)
           << " r=" << fmt(b->radius);
    else if (const auto* x = std::get_if<Box>(&k))
        os << "box lox=" << fmt(x->lo.x) << " loy=" << fmt(x->lo.y) << " hix=" << fmt(x->hi.x)
           << " hiy=" << fmt(x->hi.y);
    else if (const auto* t = std::get_if<ParabolicTube>(&k))
        os << "tube amplitude=" << fmt(t->amplitude) << " radius=" << fmt(t->radius);
    return os.str();
}

using Fields = std::map<std::string, double, std::less<>>;

double field(const Fields& f, std::string_view key, int line) {
    auto it = f.find(key);
    if (it == f.end())
        throw std::invalid_argument("domain line " + std::to_string(line) + ": missing field '" +
                                    std::string(key) + "'");
    return it->second;
}

Primitive primitive_from(std::string_view kind, const Fields& f, int line) {
    Primitive k;
    if (kind == "halfspace")
        k = make_halfspace({field(f, "nx", line), field(f, "ny", line)}, field(f, "offset", line));
    else if (kind == "ball")
        k = Ball{{field(f, "cx", line), field(f, "cy", line)}, field(f, "r", line)};
    else if (kind == "box")
        k = Box{{field(f, "lox", line), field(f, "loy", line)},
                {field(f, "hix", line), field(f, "hiy", line)}};
    else if (kind == "tube")
        k = ParabolicTube{field(f, "amplitude", line), field(f, "radius", line)};
    else
        throw std::invalid_argument("domain line " + std::to_string(line) +
                                    ": unknown primitive '" + std::string(kind) + "'");
    validate(k);
    return k;
}

Ball ball_from(std::string_view kind, const Fields& f, int line) {
    Primitive k = primitive_from(kind, f, line);
    if (!std::holds_alternative<Ball>(k))
        throw std::invalid_argument("domain line " + std::to_string(line) +
                                    ": holes and clips must be balls");
    return std::get<Ball>(k);
}

}  // namespace

DomainSpec domain_from_name(std::string_view name) {
    auto colon = name.find(':');
    std::string_view head = name.substr(0, colon);
    std::string_view args = colon == std::string_view::npos ? "" : name.substr(colon + 1);
    if (name == "straight-dumbbell") return make_dumbbell(DumbbellVariant::Straight);
    if (name == "curved-dumbbell") return make_dumbbell(DumbbellVariant::Curved);
    if (head == "annulus") {
        auto v = parse_numbers(args, "annulus radii");
        if (v.size() != 2) throw std::invalid_argument("annulus expects annulus:<rin>,<rout>");
        DomainSpec d = make_annulus(v[0], v[1]);
        d.name = std::string(name);
        return d;
    }
    if (head == "box") {
        auto v = parse_numbers(args, "box bounds");
        if (v.size() != 2) throw std::invalid_argument("box expects box:<a>,<b>");
        DomainSpec d = make_box({v[0], v[0]}, {v[1], v[1]});
        d.name = std::string(name);
        return d;
    }
    if (head == "ball") {
        auto v = parse_numbers(args, "ball radius");
        if (v.size() != 1) throw std::invalid_argument("ball expects ball:<r>");
        DomainSpec d = make_ball({0.0, 0.0}, v[0]);
        d.name = std::string(name);
        return d;
    }
    if (head == "file") {
        std::ifstream in{std::string(args)};
        if (!in) throw std::runtime_error("cannot open domain file '" + std::string(args) + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_domain(ss.str());
    }
    throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

std::string serialize_domain(const DomainSpec& d) {
    std::ostringstream os;
    os << "domain " << (d.name.empty() ? "unnamed" : d.name) << "\n";
    for (const auto& k : d.primitives) os << "primitive " << primitive_record(k) << "\n";
    for (const auto& h : d.holes) os << "hole " << primitive_record(h) << "\n";
    for (const auto& c : d.clips) os << "clip " << primitive_record(c) << "\n";
    if (d.dumbbell) {
        const auto& m = *d.dumbbell;
        os << "dumbbell minus=" << m.minus << " corridor=" << m.corridor << " plus=" << m.plus
           << " tube_radius=" << fmt(m.tube_radius) << " anchorx=" << fmt(m.anchor.x)
           << " anchory=" << fmt(m.anchor.y) << " gslox=" << fmt(m.gamma_star.lo.x)
           << " gsloy=" << fmt(m.gamma_star.lo.y) << " gshix=" << fmt(m.gamma_star.hi.x)
           << " gshiy=" << fmt(m.gamma_star.hi.y) << "\n";
        if (m.gamma_tilde) os << "gamma_tilde " << primitive_record(*m.gamma_tilde) << "\n";
    }
    return os.str();
}

DomainSpec parse_domain(std::string_view text) {
    DomainSpec d;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        auto fields_from = [&](std::size_t first) {
            Fields f;
            for (std::size_t i = first; i < tok.size(); ++i) {
                auto eq = tok[i].find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("domain line " + std::to_string(line) +
                                                ": expected key=value, got '" + tok[i] + "'");
                f[tok[i].substr(0, eq)] =
                    parse_number(std::string_view(tok[i]).substr(eq + 1), "domain record");
            }
            return f;
        };
        const std::string& rec = tok[0];
        if (rec == "domain") {
            if (tok.size() != 2)
                throw std::invalid_argument("domain line " + std::to_string(line) +
                                            ": expected 'domain <name>'");
            d.name = tok[1];
        } else if (rec == "primitive" || rec == "hole" || rec == "clip" || rec == "gamma_tilde") {
            if (tok.size() < 2)
                throw std::invalid_argument("domain line " + std::to_string(line) +
                                            ": missing primitive kind");
            Fields f = fields_from(2);
            if (rec == "primitive")
                d.primitives.push_back(primitive_from(tok[1], f, line));
            else if (rec == "hole")
                d.holes.push_back(ball_from(tok[1], f, line));
            else if (rec == "clip")
                d.clips.push_back(ball_from(tok[1], f, line));
            else {
                if (!d.dumbbell)
                    throw std::invalid_argument("domain line " + std::to_string(line) +
                                                ": gamma_tilde before dumbbell record");
                d.dumbbell->gamma_tilde = primitive_from(tok[1], f, line);
            }
        } else if (rec == "dumbbell") {
            Fields f = fields_from(1);
            DumbbellMeta m;
            m.minus = static_cast<int>(field(f, "minus", line));
            m.corridor = static_cast<int>(field(f, "corridor", line));
            m.plus = static_cast<int>(field(f, "plus", line));
            m.tube_radius = field(f, "tube_radius", line);
            m.anchor = {field(f, "anchorx", line), field(f, "anchory", line)};
            m.gamma_star = Box{{field(f, "gslox", line), field(f, "gsloy", line)},
                               {field(f, "gshix", line), field(f, "gshiy", line)}};
            d.dumbbell = m;
        } else {
            throw std::invalid_argument("domain line " + std::to_string(line) +
                                        ": unknown record '" + rec + "'");
        }
    }
    if (d.primitives.empty()) throw std::invalid_argument("domain text has no primitives");
    if (d.dumbbell) {
        const auto& m = *d.dumbbell;
        int n = static_cast<int>(d.primitives.size());
        for (int id : {m.minus, m.corridor, m.plus})
            if (id < 0 || id >= n)
                throw std::invalid_argument("dumbbell record refers to a missing primitive");
    }
    return d;
}

ConditionAReport check_condition_A(const DomainSpec& d, const std::vector<double>& R_list,
                                   int n_samples, std::uint64_t seed) {
    if (!d.dumbbell) throw std::invalid_argument("condition A: dumbbell metadata missing");
    if (R_list.empty() || n_samples <= 0)
        throw std::invalid_argument("condition A: need radii and a positive sample count");
    const DumbbellMeta& m = *d.dumbbell;
    const Primitive& minus = d.primitives.at(m.minus);
    const Primitive& corridor = d.primitives.at(m.corridor);
    const Primitive& plus = d.primitives.at(m.plus);

    ConditionAReport rep;
    rep.gamma_tilde_present = m.gamma_tilde.has_value();

    const Box& gs = m.gamma_star;
    rep.gamma_star_bounded = std::isfinite(gs.lo.x) && std::isfinite(gs.lo.y) &&
                             std::isfinite(gs.hi.x) && std::isfinite(gs.hi.y) &&
                             gs.lo.x < gs.hi.x && gs.lo.y < gs.hi.y;
    if (!rep.gamma_star_bounded) rep.violations.push_back("Gamma* is not bounded");

    // D- and D+ must be disjoint and each must overlap the corridor in positive measure.
    SplitMix64 rng(derive_seed(seed, "geometry-MC"));
    long minus_hits = 0, plus_hits = 0, both = 0;
    Box win{{gs.lo.x - 2.0, gs.lo.y}, {gs.hi.x + 2.0, gs.hi.y}};
    for (int i = 0; i < n_samples; ++i) {
        Vec2 x{rng.uniform(win.lo.x, win.hi.x), rng.uniform(win.lo.y, win.hi.y)};
        bool in_c = inside(corridor, x);
        bool in_m = inside(minus, x);
        bool in_p = inside(plus, x);
        minus_hits += in_c && in_m;
        plus_hits += in_c && in_p;
        both += in_m && in_p;
    }
    rep.overlap_ok = minus_hits > 0 && plus_hits > 0;
    if (!rep.overlap_ok) rep.violations.push_back("corridor does not overlap both bells");
    if (both > 0) {
        rep.overlap_ok = false;
        rep.violations.push_back("D- and D+ intersect");
    }

    rep.volume_ok = true;
    for (double R : R_list) {
        ConditionARow row;
        row.R = R;
        long nm = 0, np = 0, tm = 0, tp = 0;
        for (int i = 0; i < n_samples; ++i) {
            Vec2 x = m.anchor + Vec2{rng.uniform(-R, R), rng.uniform(-R, R)};
            if (!(norm(x - m.anchor) < R)) continue;
            bool in_m = inside(minus, x);
            bool in_p = inside(plus, x);
            nm += in_m;
            np += in_p;
            if (m.gamma_tilde && inside(*m.gamma_tilde, x)) {
                tm += in_m;
                tp += in_p;
            }
        }
        double cell = 4.0 * R * R / n_samples;
        row.minus_ratio = nm * cell / (R * R);
        row.plus_ratio = np * cell / (R * R);
        row.tilde_minus_ratio = tm * cell / R;
        row.tilde_plus_ratio = tp * cell / R;
        for (double v : {row.minus_ratio, row.plus_ratio}) {
            if (v < rep.band_lo || v > rep.band_hi) {
                rep.volume_ok = false;
                rep.violations.push_back("bell volume ratio " + fmt(v) + " at R=" + fmt(R) +
                                         " outside [" + fmt(rep.band_lo) + "," +
                                         fmt(rep.band_hi) + "]");
            }
        }
        rep.rows.push_back(row);
    }

    if (rep.gamma_tilde_present) {
        double lo = kInf, hi = 0.0;
        for (const auto& r : rep.rows) {
            lo = std::min({lo, r.tilde_minus_ratio, r.tilde_plus_ratio});
            hi = std::max({hi, r.tilde_minus_ratio, r.tilde_plus_ratio});
        }
        rep.gamma_tilde_stable = lo > 0.0 && hi / lo <= 2.0;
        if (!rep.gamma_tilde_stable)
            rep.violations.push_back("|Gamma~ cap D_R^+-|/R is not stable across R");
    }
    rep.pass = rep.gamma_star_bounded && rep.overlap_ok && rep.volume_ok &&
               (!rep.gamma_tilde_present || rep.gamma_tilde_stable);
    return rep;
}

}  // namespace nlvis
