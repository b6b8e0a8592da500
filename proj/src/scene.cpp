#include "eis/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eis/errors.hpp"

namespace eis {

namespace {

constexpr double kClosedTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pair_msg(const char* kind, std::size_t i, std::size_t j, double gap, double need) {
    std::ostringstream os;
    os << kind << " pair (" << i << "," << j << ") gap " << gap << " < required " << need;
    return os.str();
}

// Flat-capped strip membership: perpendicular distance <= delta within some
// segment's span, or distance <= delta to an interior vertex (round join).
bool in_crack_strip(const Crack& c, const Vec2& p) {
    const auto& pts = c.polyline;
    const double delta = c.half_thickness;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 a = pts[i - 1];
        const Vec2 b = pts[i];
        const Vec2 ab = b - a;
        const double len2 = norm2(ab);
        if (len2 == 0.0) continue;
        const double t = dot(p - a, ab) / len2;
        if (t < 0.0 || t > 1.0) continue;
        const double d = std::abs(cross(ab, p - a)) / std::sqrt(len2);
        if (d <= delta) return true;
    }
    const bool closed = c.closed();
    const std::size_t lo = closed ? 0 : 1;
    const std::size_t hi = closed ? pts.size() : pts.size() - 1;
    for (std::size_t i = lo; i < hi; ++i)
        if (norm(p - pts[i]) <= delta) return true;
    return false;
}

}  // namespace

bool Crack::closed() const {
    return polyline.size() >= 4 && norm(polyline.front() - polyline.back()) < kClosedTol;
}

const Material& Scene::material_of_region(int region) const {
    if (region == kRegionBackground) return background;
    if (region <= static_cast<int>(cracks.size())) return crack_material;
    return bar_material;
}

SeparationReport validate_scene(const Scene& scene) {
    if (!(scene.domain_radius > 0.0)) throw DegenerateGeometry("domain_radius must be positive");
    if (!(scene.d0 > 0.0)) throw DegenerateGeometry("d0 must be positive");
    if (!(scene.background.sigma > 0.0))
        throw DegenerateGeometry("background conductivity must be positive");

    for (std::size_t k = 0; k < scene.cracks.size(); ++k) {
        const Crack& c = scene.cracks[k];
        std::ostringstream tag;
        tag << "crack " << k;
        if (c.polyline.size() < 2) throw DegenerateGeometry(tag.str() + ": needs >= 2 points");
        if (!(c.half_thickness > 0.0))
            throw DegenerateGeometry(tag.str() + ": half_thickness must be positive");
        for (std::size_t i = 1; i < c.polyline.size(); ++i)
            if (norm(c.polyline[i] - c.polyline[i - 1]) <= 4.0 * c.half_thickness)
                throw DegenerateGeometry(tag.str() + ": segment shorter than strip width");
    }
    for (std::size_t k = 0; k < scene.bars.size(); ++k)
        if (!(scene.bars[k].radius > 0.0))
            throw DegenerateGeometry("bar " + std::to_string(k) + ": radius must be positive");

    SeparationReport rep{kInf, kInf, kInf, kInf, kInf};
    const double R = scene.domain_radius;
    const double d0 = scene.d0;

    for (std::size_t i = 0; i < scene.cracks.size(); ++i) {
        const Crack& ci = scene.cracks[i];
        double reach = 0.0;
        for (const Vec2& p : ci.polyline) reach = std::max(reach, norm(p));
        const double gap_bnd = R - reach - ci.half_thickness;
        rep.crack_boundary = std::min(rep.crack_boundary, gap_bnd);
        if (gap_bnd < d0)
            throw SeparationViolation(pair_msg("crack-boundary", i, i, gap_bnd, d0));

        for (std::size_t j = i + 1; j < scene.cracks.size(); ++j) {
            const Crack& cj = scene.cracks[j];
            const double gap = polyline_polyline_dist(ci.polyline, cj.polyline) -
                               ci.half_thickness - cj.half_thickness;
            rep.crack_crack = std::min(rep.crack_crack, gap);
            if (gap < d0) throw SeparationViolation(pair_msg("crack-crack", i, j, gap, d0));
        }
        for (std::size_t j = 0; j < scene.bars.size(); ++j) {
            const Bar& b = scene.bars[j];
            const double gap = point_polyline_dist(b.center, ci.polyline) - ci.half_thickness -
                               b.radius;
            rep.crack_bar = std::min(rep.crack_bar, gap);
            if (gap < 2.0 * d0)
                throw SeparationViolation(pair_msg("crack-bar", i, j, gap, 2.0 * d0));
        }
    }
    for (std::size_t i = 0; i < scene.bars.size(); ++i) {
        const Bar& bi = scene.bars[i];
        const double gap_bnd = R - norm(bi.center) - bi.radius;
        rep.bar_boundary = std::min(rep.bar_boundary, gap_bnd);
        if (gap_bnd < d0) throw SeparationViolation(pair_msg("bar-boundary", i, i, gap_bnd, d0));
        for (std::size_t j = i + 1; j < scene.bars.size(); ++j) {
            const Bar& bj = scene.bars[j];
            const double gap = norm(bi.center - bj.center) - bi.radius - bj.radius;
            rep.bar_bar = std::min(rep.bar_bar, gap);
            if (gap < d0) throw SeparationViolation(pair_msg("bar-bar", i, j, gap, d0));
        }
    }
    return rep;
}

int region_at(const Scene& scene, const Vec2& p) {
    if (norm(p) > scene.domain_radius)
        throw PointOutsideDomain("point at radius " + std::to_string(norm(p)));
    for (std::size_t k = 0; k < scene.cracks.size(); ++k)
        if (in_crack_strip(scene.cracks[k], p)) return crack_region(static_cast<int>(k));
    for (std::size_t k = 0; k < scene.bars.size(); ++k)
        if (norm(p - scene.bars[k].center) <= scene.bars[k].radius)
            return bar_region(static_cast<int>(k), static_cast<int>(scene.cracks.size()));
    return kRegionBackground;
}

Complex admittivity_at(const Scene& scene, const Vec2& p, double omega) {
    return scene.material_of_region(region_at(scene, p)).admittivity(omega);
}

namespace {

Crack horizontal_crack(double y, double half_span, double delta) {
    return Crack{{{-half_span, y}, {half_span, y}}, delta};
}

Crack vertical_crack(double x, double half_span, double delta) {
    return Crack{{{x, -half_span}, {x, half_span}}, delta};
}

Crack arc_crack(Vec2 center, double radius, double deg0, double deg1, int segments,
                double delta) {
    Crack c;
    c.half_thickness = delta;
    for (int i = 0; i <= segments; ++i) {
        const double a = (deg0 + (deg1 - deg0) * i / segments) * kPi / 180.0;
        c.polyline.push_back(center + radius * Vec2{std::cos(a), std::sin(a)});
    }
    return c;
}

}  // namespace

Scene builtin_model(int model) {
    Scene s;
    switch (model) {
        case 1:
            s.bars = {{{-0.05, 0.0}, 0.015}, {{0.05, 0.0}, 0.015}};
            s.cracks = {horizontal_crack(0.03, 0.07, 5e-5),
                        horizontal_crack(-0.03, 0.07, 2.5e-5)};
            break;
        case 2:
            s.bars = {{{-0.05, 0.0}, 0.015}, {{0.05, 0.0}, 0.015}};
            s.cracks = {horizontal_crack(0.03, 0.07, 2.5e-5),
                        horizontal_crack(-0.03, 0.07, 2.5e-5),
                        vertical_crack(-0.08, 0.03, 2.5e-5),
                        vertical_crack(0.08, 0.03, 2.5e-5)};
            break;
        case 3:
            s.bars = {{{-0.045, 0.02}, 0.02}, {{0.05, 0.03}, 0.015}};
            s.cracks = {arc_crack({0.0, 0.0}, 0.075, 185.0, 285.0, 24, 5e-5),
                        arc_crack({0.0, 0.0}, 0.08, 60.0, 120.0, 24, 5e-5)};
            break;
        default:
            throw UnknownModel("model " + std::to_string(model));
    }
    validate_scene(s);
    return s;
}

Scene without_defects(const Scene& scene) {
    Scene s = scene;
    s.cracks.clear();
    s.bars.clear();
    return s;
}

Scene with_crack_thickness(const Scene& scene, double delta) {
    Scene s = scene;
    for (Crack& c : s.cracks) c.half_thickness = delta;
    return s;
}

namespace {

nlohmann::ordered_json material_json(const Material& m) {
    return {{"sigma", m.sigma}, {"epsilon", m.epsilon}};
}

Material material_from(const nlohmann::json& j) {
    Material m;
    m.sigma = j.at("sigma").get<double>();
    m.epsilon = j.at("epsilon").get<double>();
    return m;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
    nlohmann::ordered_json j;
    j["domain_radius"] = scene.domain_radius;
    j["d0"] = scene.d0;
    j["materials"] = {{"background", material_json(scene.background)},
                      {"crack", material_json(scene.crack_material)},
                      {"bar", material_json(scene.bar_material)}};
    j["cracks"] = nlohmann::ordered_json::array();
    for (const Crack& c : scene.cracks) {
        nlohmann::ordered_json jc;
        jc["points"] = nlohmann::ordered_json::array();
        for (const Vec2& p : c.polyline) jc["points"].push_back({p.x, p.y});
        jc["half_thickness"] = c.half_thickness;
        j["cracks"].push_back(jc);
    }
    j["bars"] = nlohmann::ordered_json::array();
    for (const Bar& b : scene.bars)
        j["bars"].push_back({{"center", {b.center.x, b.center.y}}, {"radius", b.radius}});
    return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene json: ") + e.what());
    }
    try {
        Scene s;
        s.domain_radius = j.at("domain_radius").get<double>();
        s.d0 = j.value("d0", 0.005);
        if (j.contains("materials")) {
            const auto& m = j.at("materials");
            if (m.contains("background")) s.background = material_from(m.at("background"));
            if (m.contains("crack")) s.crack_material = material_from(m.at("crack"));
            if (m.contains("bar")) s.bar_material = material_from(m.at("bar"));
        }
        for (const auto& jc : j.value("cracks", nlohmann::json::array())) {
            Crack c;
            for (const auto& p : jc.at("points"))
                c.polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            c.half_thickness = jc.at("half_thickness").get<double>();
            s.cracks.push_back(std::move(c));
        }
        for (const auto& jb : j.value("bars", nlohmann::json::array())) {
            Bar b;
            b.center = {jb.at("center").at(0).get<double>(), jb.at("center").at(1).get<double>()};
            b.radius = jb.at("radius").get<double>();
            s.bars.push_back(b);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene json: ") + e.what());
    }
}

}  // namespace eis
