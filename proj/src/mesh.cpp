#include "eis/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "eis/errors.hpp"
#include "eis/triangulate.hpp"

namespace eis {
namespace {

// Planned point set with proximity culling on a uniform grid. Forced points
// always enter (deduplicated); optional points are dropped inside any keep-out
// disk. Deterministic: outcome depends only on the call sequence.
class PlannedPoints {
  public:
    PlannedPoints(double cell, double dedup_tol) : cell_(cell), tol_(dedup_tol) {}

    int force(const Vec2& p, double keep_out) { return place(p, keep_out, true); }
    int try_add(const Vec2& p, double keep_out) { return place(p, keep_out, false); }

    const std::vector<Vec2>& pts() const { return pts_; }
    const std::vector<char>& forced() const { return forced_; }

  private:
    long long cell_key(const Vec2& p) const {
        const long long ix = static_cast<long long>(std::floor(p.x / cell_)) + (1LL << 20);
        const long long iy = static_cast<long long>(std::floor(p.y / cell_)) + (1LL << 20);
        return ix * (1LL << 22) + iy;
    }

    int place(const Vec2& p, double keep_out, bool is_forced) {
        const double reach = std::max(max_protect_, keep_out);
        const int span = std::max(1, static_cast<int>(std::ceil(reach / cell_)));
        const long long ix0 = static_cast<long long>(std::floor(p.x / cell_)) + (1LL << 20);
        const long long iy0 = static_cast<long long>(std::floor(p.y / cell_)) + (1LL << 20);
        for (long long ix = ix0 - span; ix <= ix0 + span; ++ix)
            for (long long iy = iy0 - span; iy <= iy0 + span; ++iy) {
                const auto it = grid_.find(ix * (1LL << 22) + iy);
                if (it == grid_.end()) continue;
                for (const int j : it->second) {
                    const double d = norm(p - pts_[j]);
                    if (d < tol_) return j;
                    if (!is_forced && d < std::max(protect_[j], keep_out)) return -1;
                }
            }
        const int id = static_cast<int>(pts_.size());
        pts_.push_back(p);
        protect_.push_back(keep_out);
        forced_.push_back(is_forced ? 1 : 0);
        grid_[cell_key(p)].push_back(id);
        max_protect_ = std::max(max_protect_, keep_out);
        return id;
    }

    double cell_;
    double tol_;
    double max_protect_ = 0.0;
    std::vector<Vec2> pts_;
    std::vector<double> protect_;
    std::vector<char> forced_;
    std::unordered_map<long long, std::vector<int>> grid_;
};

struct SampledRow {
    std::vector<Vec2> pts;
    std::vector<double> arc;
};

// Offset copy of a polyline at signed distance off (left of travel for
// off > 0), miter joins, resampled at roughly the requested spacing.
// Closed chains take verts without the duplicate last vertex.
SampledRow sample_offset(const std::vector<Vec2>& verts, bool closed, double off, double spacing) {
    const int n = static_cast<int>(verts.size());
    std::vector<Vec2> miter(n);
    for (int i = 0; i < n; ++i) {
        const bool has_prev = closed || i > 0;
        const bool has_next = closed || i + 1 < n;
        Vec2 nin{0.0, 0.0}, nout{0.0, 0.0};
        if (has_prev) nin = perp(normalized(verts[i] - verts[(i - 1 + n) % n]));
        if (has_next) nout = perp(normalized(verts[(i + 1) % n] - verts[i]));
        if (!has_prev) {
            miter[i] = nout;
        } else if (!has_next) {
            miter[i] = nin;
        } else {
            const Vec2 sum = nin + nout;
            if (norm(sum) < 0.2) {
                miter[i] = nout;
            } else {
                const Vec2 s = normalized(sum);
                miter[i] = s / std::max(dot(s, nout), 0.5);
            }
        }
    }
    std::vector<Vec2> ov(n);
    for (int i = 0; i < n; ++i) ov[i] = verts[i] + miter[i] * off;

    SampledRow out;
    double acc = 0.0;
    const int segs = closed ? n : n - 1;
    for (int s = 0; s < segs; ++s) {
        const Vec2 a = ov[s];
        const Vec2 b = ov[(s + 1) % n];
        const double len = norm(b - a);
        const int k = std::max(1, static_cast<int>(std::lround(len / spacing)));
        for (int j = 0; j < k; ++j) {
            const double t = static_cast<double>(j) / k;
            out.pts.push_back(a + (b - a) * t);
            out.arc.push_back(acc + len * t);
        }
        acc += len;
    }
    if (!closed) {
        out.pts.push_back(ov[n - 1]);
        out.arc.push_back(acc);
    }
    return out;
}

std::vector<Vec2> unique_vertices(const Crack& crack) {
    std::vector<Vec2> v = crack.polyline;
    if (crack.closed()) v.pop_back();
    return v;
}

struct ChainPlan {
    int crack = 0;
    bool closed = false;
    std::vector<int> planned;  // planned point ids along the centerline
    std::vector<double> arc;
};

long long ekey(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

// Splits the triangle fan around each interior chain node into the two sides
// of the crack and rewires the minus side onto duplicated nodes.
void duplicate_chain(Mesh& m, const std::vector<std::vector<int>>& star, const ChainPlan& plan,
                     const std::vector<int>& chain, CrackInterface& out) {
    const int M = static_cast<int>(chain.size());
    out.crack = plan.crack;
    out.closed = plan.closed;
    out.plus = chain;
    out.minus = chain;
    out.arc = plan.arc;

    std::unordered_set<long long> chain_edge;
    for (int i = 0; i + 1 < M; ++i) chain_edge.insert(ekey(chain[i], chain[i + 1]));
    if (plan.closed) chain_edge.insert(ekey(chain[M - 1], chain[0]));

    const int lo = plan.closed ? 0 : 1;
    const int hi = plan.closed ? M : M - 1;
    std::vector<std::vector<int>> minus_fans(M);
    for (int i = lo; i < hi; ++i) {
        const int a = chain[i];
        const int next = chain[(i + 1) % M];
        int seed = -1;
        for (const int t : star[a])
            for (int k = 0; k < 3; ++k)
                if (m.tris[t].v[k] == a && m.tris[t].v[(k + 1) % 3] == next) seed = t;
        if (seed < 0) throw SingularSystem("crack interface edge missing from mesh");
        // Fan triangles containing the directed edge (a -> next) and everything
        // reachable from them around a without crossing a chain edge form the
        // plus side.
        std::vector<int> plus_fan{seed};
        std::vector<int> stack{seed};
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                const int u = m.tris[t].v[k];
                if (u == a || chain_edge.count(ekey(a, u))) continue;
                for (const int t2 : star[a]) {
                    if (t2 == t) continue;
                    bool shares = false;
                    for (int k2 = 0; k2 < 3; ++k2) shares = shares || m.tris[t2].v[k2] == u;
                    if (!shares) continue;
                    if (std::find(plus_fan.begin(), plus_fan.end(), t2) != plus_fan.end()) continue;
                    plus_fan.push_back(t2);
                    stack.push_back(t2);
                }
            }
        }
        for (const int t : star[a])
            if (std::find(plus_fan.begin(), plus_fan.end(), t) == plus_fan.end())
                minus_fans[i].push_back(t);
        if (minus_fans[i].empty()) throw SingularSystem("crack interface has a one-sided node");
    }
    for (int i = lo; i < hi; ++i) {
        const int a = chain[i];
        const int dup = m.n_nodes();
        m.nodes.push_back(m.nodes[a]);
        for (const int t : minus_fans[i])
            for (int k = 0; k < 3; ++k)
                if (m.tris[t].v[k] == a) m.tris[t].v[k] = dup;
        out.minus[i] = dup;
    }
}

}  // namespace

Mesh build_mesh(const Scene& scene, const MeshOptions& opts) {
    validate_scene(scene);
    const double R = scene.domain_radius;
    const double h = opts.target_h > 0.0 ? opts.target_h : R / 25.0;
    if (h <= 0.0 || h > R) throw BadConfig("mesh spacing must lie in (0, R]");
    if (opts.electrode_coverage <= 0.0 || opts.electrode_coverage > 1.0)
        throw BadConfig("electrode coverage must lie in (0, 1]");
    if (opts.element_cap < 100) throw BadConfig("element cap is too small to mesh anything");
    if (opts.interface_spacing < 0.0) throw BadConfig("interface spacing must be nonnegative");

    if (opts.resolve_crack_strips && !scene.cracks.empty()) {
        double est = 0.0;
        double total_len = 0.0;
        for (const Crack& c : scene.cracks) {
            est += 55.0 * c.length() / c.half_thickness;
            total_len += c.length();
        }
        if (est > opts.element_cap) {
            std::ostringstream msg;
            msg << "resolving crack strips needs about " << static_cast<long long>(est)
                << " elements, above the cap " << opts.element_cap
                << "; for a uniform half thickness the thinnest buildable value is about "
                << 55.0 * total_len / opts.element_cap;
            throw InfeasibleResolution(msg.str());
        }
    }

    const double ideal_bnd = 2.0 * kPi * R / h;
    const int n_bnd = 32 * std::max(2, static_cast<int>(std::ceil(ideal_bnd / 32.0)));
    const double spacing_b = 2.0 * kPi * R / n_bnd;

    PlannedPoints pp(h, 1e-9 * R);
    std::vector<std::pair<int, int>> constraints;
    std::vector<int> rim(n_bnd);
    for (int k = 0; k < n_bnd; ++k) {
        const double th = 2.0 * kPi * k / n_bnd;
        rim[k] = pp.force({R * std::cos(th), R * std::sin(th)}, 0.62 * spacing_b);
    }
    for (int k = 0; k < n_bnd; ++k) constraints.emplace_back(rim[k], rim[(k + 1) % n_bnd]);

    const auto in_domain = [&](const Vec2& p) { return norm(p) < R - 0.8 * spacing_b; };
    const auto near_strip = [&](const Vec2& p) {
        if (!opts.resolve_crack_strips) return false;
        for (const Crack& c : scene.cracks)
            if (point_polyline_dist(p, c.polyline) < 1.3 * c.half_thickness) return true;
        return false;
    };
    const auto scatter = [&](const SampledRow& row, double keep_out) {
        for (const Vec2& p : row.pts)
            if (in_domain(p) && !near_strip(p)) pp.try_add(p, keep_out);
    };

    std::vector<ChainPlan> chains;
    for (int ci = 0; ci < static_cast<int>(scene.cracks.size()); ++ci) {
        const Crack& crack = scene.cracks[ci];
        const std::vector<Vec2> verts = unique_vertices(crack);
        const bool closed = crack.closed();
        const double len = crack.length();
        const double delta = crack.half_thickness;
        double s0;
        if (opts.resolve_crack_strips) {
            s0 = 0.55 * delta;
            const double offs[4] = {delta, delta / 3.0, -delta / 3.0, -delta};
            SampledRow rows[4];
            std::vector<int> ids[4];
            for (int r = 0; r < 4; ++r) {
                rows[r] = sample_offset(verts, closed, offs[r], s0);
                for (const Vec2& p : rows[r].pts) ids[r].push_back(pp.force(p, 0.62 * s0));
            }
            for (const int r : {0, 3}) {
                const int m = static_cast<int>(ids[r].size());
                for (int j = 0; j + 1 < m; ++j) constraints.emplace_back(ids[r][j], ids[r][j + 1]);
                if (closed) constraints.emplace_back(ids[r][m - 1], ids[r][0]);
            }
            if (!closed) {
                for (int r = 0; r < 3; ++r) {
                    constraints.emplace_back(ids[r].front(), ids[r + 1].front());
                    constraints.emplace_back(ids[r].back(), ids[r + 1].back());
                }
            }
        } else {
            s0 = opts.interface_spacing > 0.0 ? opts.interface_spacing : 0.5 * h;
            s0 = std::min(s0, len / (closed ? 8.0 : 4.0));
            const SampledRow row = sample_offset(verts, closed, 0.0, s0);
            ChainPlan plan;
            plan.crack = ci;
            plan.closed = closed;
            plan.arc = row.arc;
            for (const Vec2& p : row.pts) plan.planned.push_back(pp.force(p, 0.62 * s0));
            const int m = static_cast<int>(plan.planned.size());
            for (int j = 0; j + 1 < m; ++j)
                constraints.emplace_back(plan.planned[j], plan.planned[j + 1]);
            if (closed) constraints.emplace_back(plan.planned[m - 1], plan.planned[0]);
            chains.push_back(std::move(plan));
        }
        // Graded support rows on both sides, plus fans past the open ends, so
        // spacing grows geometrically from the crack out to the background.
        const double w0 = opts.resolve_crack_strips ? delta : 0.0;
        double sp = 1.7 * s0;
        double gap = w0 + 0.8 * s0;
        while (sp < h && gap < R) {
            scatter(sample_offset(verts, closed, gap, sp), 0.62 * sp);
            scatter(sample_offset(verts, closed, -gap, sp), 0.62 * sp);
            if (!closed) {
                const Vec2 ends[2] = {verts.front(), verts.back()};
                const Vec2 outward[2] = {normalized(verts.front() - verts[1]),
                                         normalized(verts.back() - verts[verts.size() - 2])};
                for (int e = 0; e < 2; ++e) {
                    const int kf = std::max(2, static_cast<int>(std::lround(kPi * gap / sp)));
                    SampledRow fan;
                    for (int j = 0; j <= kf; ++j) {
                        const double phi = -0.5 * kPi + kPi * j / kf;
                        fan.pts.push_back(ends[e] + (outward[e] * std::cos(phi) +
                                                     perp(outward[e]) * std::sin(phi)) *
                                                        gap);
                    }
                    scatter(fan, 0.62 * sp);
                }
            }
            gap += sp;
            sp *= 1.7;
        }
    }

    for (const Bar& bar : scene.bars) {
        const double r = bar.radius;
        const int n_c =
            std::max(48, 8 * static_cast<int>(std::lround(2.0 * kPi * r / (0.8 * h) / 8.0)));
        const double ring_sp = 2.0 * kPi * r / n_c;
        std::vector<int> ring(n_c);
        for (int k = 0; k < n_c; ++k) {
            const double th = 2.0 * kPi * k / n_c;
            ring[k] = pp.force(bar.center + Vec2{r * std::cos(th), r * std::sin(th)},
                               0.62 * ring_sp);
        }
        for (int k = 0; k < n_c; ++k) constraints.emplace_back(ring[k], ring[(k + 1) % n_c]);
        const int n_in = std::max(8, n_c / 2);
        SampledRow inner;
        for (int k = 0; k < n_in; ++k) {
            const double th = 2.0 * kPi * (k + 0.5) / n_in;
            inner.pts.push_back(bar.center + Vec2{0.5 * r * std::cos(th), 0.5 * r * std::sin(th)});
        }
        scatter(inner, 0.62 * kPi * r / n_in);
        pp.try_add(bar.center, 0.4 * r * 0.62);
        const double halo_sp = std::min(1.7 * ring_sp, h);
        const int n_halo = std::max(8, static_cast<int>(std::lround(2.0 * kPi * 1.38 * r / halo_sp)));
        SampledRow halo;
        for (int k = 0; k < n_halo; ++k) {
            const double th = 2.0 * kPi * (k + 0.5) / n_halo;
            halo.pts.push_back(bar.center +
                               Vec2{1.38 * r * std::cos(th), 1.38 * r * std::sin(th)});
        }
        scatter(halo, 0.62 * halo_sp);
    }

    const int n_r = std::max(3, static_cast<int>(std::lround(R / h)));
    pp.try_add({0.0, 0.0}, 0.0);
    for (int i = 1; i < n_r; ++i) {
        const double ri = R * i / n_r;
        const int m = std::max(6, static_cast<int>(std::lround(2.0 * kPi * ri / h)));
        const double phase = (i % 2) * kPi / m;
        SampledRow row;
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * kPi * j / m + phase;
            row.pts.push_back({ri * std::cos(th), ri * std::sin(th)});
        }
        scatter(row, 0.0);
    }

    Delaunay del(R);
    const auto& planned = pp.pts();
    const auto& forced = pp.forced();
    std::vector<int> del_id(planned.size(), -1);
    for (std::size_t i = 0; i < planned.size(); ++i)
        del_id[i] = del.insert(planned[i], forced[i] != 0);
    for (const auto& [a, b] : constraints)
        if (del_id[a] >= 0 && del_id[b] >= 0 && del_id[a] != del_id[b])
            del.insert_constraint(del_id[a], del_id[b]);
    std::vector<int> old_to_new;
    del.finalize(old_to_new);
    const auto fid = [&](int planned_id) {
        const int d = del_id[planned_id];
        return d >= 0 ? old_to_new[d] : -1;
    };

    Mesh mesh;
    mesh.nodes = del.points();
    mesh.domain_radius = R;
    mesh.target_h = h;
    const auto label = [&](const Vec2& c) {
        if (opts.resolve_crack_strips) return region_at(scene, c);
        for (int b = 0; b < static_cast<int>(scene.bars.size()); ++b)
            if (norm(c - scene.bars[b].center) <= scene.bars[b].radius)
                return bar_region(b, static_cast<int>(scene.cracks.size()));
        return kRegionBackground;
    };
    for (const Delaunay::Tri& t : del.triangles()) {
        const Vec2 c = (mesh.nodes[t.v[0]] + mesh.nodes[t.v[1]] + mesh.nodes[t.v[2]]) / 3.0;
        mesh.tris.push_back({{t.v[0], t.v[1], t.v[2]}, label(c)});
        if (tri_area(mesh, mesh.n_tris() - 1) <= 0.0)
            throw SingularSystem("mesh produced a degenerate triangle");
    }
    if (mesh.n_tris() > opts.element_cap) {
        std::ostringstream msg;
        msg << "mesh has " << mesh.n_tris() << " elements, above the cap " << opts.element_cap;
        throw MeshBudgetExceeded(msg.str());
    }

    if (!chains.empty()) {
        std::vector<std::vector<int>> star(mesh.n_nodes());
        for (int t = 0; t < mesh.n_tris(); ++t)
            for (const int v : mesh.tris[t].v) star[v].push_back(t);
        for (const ChainPlan& plan : chains) {
            std::vector<int> chain;
            for (const int pid : plan.planned) {
                const int f = fid(pid);
                if (f < 0) throw SingularSystem("crack interface node lost during meshing");
                chain.push_back(f);
            }
            CrackInterface ci;
            duplicate_chain(mesh, star, plan, chain, ci);
            mesh.interfaces.push_back(std::move(ci));
        }
    }

    // Rim extraction: every node sitting on the outer circle, CCW from angle 0.
    std::vector<std::pair<double, int>> rim_nodes;
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        if (std::abs(norm(mesh.nodes[i]) - R) > 1e-9 * R) continue;
        double th = std::atan2(mesh.nodes[i].y, mesh.nodes[i].x);
        if (th < -1e-12) th += 2.0 * kPi;
        rim_nodes.emplace_back(th, i);
    }
    std::sort(rim_nodes.begin(), rim_nodes.end());
    for (const auto& [th, i] : rim_nodes) mesh.boundary_loop.push_back(i);
    mesh.electrodes.assign(kNumElectrodes, {});
    const double arc_span = opts.electrode_coverage * 2.0 * kPi / kNumElectrodes;
    for (int e = 0; e < kNumElectrodes; ++e) {
        const double start = 2.0 * kPi * e / kNumElectrodes;
        for (const auto& [th, i] : rim_nodes)
            if (th > start - 1e-9 && th < start + arc_span + 1e-9) mesh.electrodes[e].push_back(i);
        if (mesh.electrodes[e].size() < 2)
            throw SingularSystem("electrode arc resolved by fewer than two nodes");
    }
    return mesh;
}

double tri_area(const Mesh& mesh, int t) {
    const MeshTri& tr = mesh.tris[t];
    const Vec2 a = mesh.nodes[tr.v[0]];
    const Vec2 b = mesh.nodes[tr.v[1]];
    const Vec2 c = mesh.nodes[tr.v[2]];
    return 0.5 * cross(b - a, c - a);
}

Vec2 tri_centroid(const Mesh& mesh, int t) {
    const MeshTri& tr = mesh.tris[t];
    return (mesh.nodes[tr.v[0]] + mesh.nodes[tr.v[1]] + mesh.nodes[tr.v[2]]) / 3.0;
}

std::vector<double> region_areas(const Mesh& mesh, int n_regions) {
    std::vector<double> areas(n_regions, 0.0);
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const int r = mesh.tris[t].region;
        if (r >= 0 && r < n_regions) areas[r] += tri_area(mesh, t);
    }
    return areas;
}

double median_edge_length(const Mesh& mesh) {
    std::unordered_set<long long> seen;
    std::vector<double> lens;
    for (const MeshTri& t : mesh.tris)
        for (int k = 0; k < 3; ++k) {
            const int a = t.v[k];
            const int b = t.v[(k + 1) % 3];
            if (!seen.insert(ekey(a, b)).second) continue;
            lens.push_back(norm(mesh.nodes[a] - mesh.nodes[b]));
        }
    if (lens.empty()) return 0.0;
    std::nth_element(lens.begin(), lens.begin() + lens.size() / 2, lens.end());
    return lens[lens.size() / 2];
}

int find_node_near(const Mesh& mesh, const Vec2& p) {
    int best = -1;
    double best_d = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const double d = norm2(mesh.nodes[i] - p);
        if (best < 0 || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

}  // namespace eis
