#include "eis/triangulate.hpp"

#include <algorithm>
#include <cmath>

#include "eis/errors.hpp"

namespace eis {

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const long double acx = static_cast<long double>(a.x) - c.x;
    const long double acy = static_cast<long double>(a.y) - c.y;
    const long double bcx = static_cast<long double>(b.x) - c.x;
    const long double bcy = static_cast<long double>(b.y) - c.y;
    return static_cast<double>(acx * bcy - acy * bcx);
}

namespace {

long double incircle_det(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const long double adx = static_cast<long double>(a.x) - d.x;
    const long double ady = static_cast<long double>(a.y) - d.y;
    const long double bdx = static_cast<long double>(b.x) - d.x;
    const long double bdy = static_cast<long double>(b.y) - d.y;
    const long double cdx = static_cast<long double>(c.x) - d.x;
    const long double cdy = static_cast<long double>(c.y) - d.y;
    const long double ad2 = adx * adx + ady * ady;
    const long double bd2 = bdx * bdx + bdy * bdy;
    const long double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
           ad2 * (bdx * cdy - cdx * bdy);
}

}  // namespace

Delaunay::Delaunay(double span) {
    const double s = 16.0 * span;
    points_ = {{-s, -s}, {s, -s}, {0.0, s}};
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    vertex_tri_ = {0, 0, 0};
}

long long Delaunay::edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

bool Delaunay::is_constrained(int a, int b) const {
    return constraints_.count(edge_key(a, b)) > 0;
}

bool Delaunay::in_circumcircle(const Tri& t, const Vec2& p) const {
    return incircle_det(points_[t.v[0]], points_[t.v[1]], points_[t.v[2]], p) > 0.0L;
}

int Delaunay::locate(const Vec2& p) const {
    int cur = last_tri_;
    if (cur >= static_cast<int>(tris_.size()) || !tris_[cur].alive)
        for (cur = static_cast<int>(tris_.size()) - 1; cur > 0 && !tris_[cur].alive; --cur) {}
    for (std::size_t steps = 0; steps < tris_.size() + 8; ++steps) {
        const Tri& t = tris_[cur];
        int next = -1;
        for (int e = 0; e < 3; ++e) {
            const Vec2& a = points_[t.v[(e + 1) % 3]];
            const Vec2& b = points_[t.v[(e + 2) % 3]];
            if (orient2d(a, b, p) < 0.0) {
                next = t.n[e];
                break;
            }
        }
        if (next == -1) return cur;
        cur = next;
    }
    throw SingularSystem("triangulation walk failed to terminate");
}

int Delaunay::insert(const Vec2& p, bool must_succeed) {
    const int seed = locate(p);
    // Cavity: BFS over triangles whose circumcircle strictly contains p,
    // never expanding across a constrained edge.
    std::vector<int> bad;
    std::vector<char> in_bad(tris_.size(), 0);
    std::vector<int> stack{seed};
    in_bad[seed] = 1;
    while (!stack.empty()) {
        const int ti = stack.back();
        stack.pop_back();
        bad.push_back(ti);
        for (int e = 0; e < 3; ++e) {
            const int nb = tris_[ti].n[e];
            if (nb < 0 || in_bad[nb]) continue;
            if (is_constrained(tris_[ti].v[(e + 1) % 3], tris_[ti].v[(e + 2) % 3])) continue;
            if (in_circumcircle(tris_[nb], p)) {
                in_bad[nb] = 1;
                stack.push_back(nb);
            }
        }
    }
    struct BEdge {
        int a, b, outside;
    };
    std::vector<BEdge> ring;
    for (const int ti : bad) {
        const Tri& t = tris_[ti];
        for (int e = 0; e < 3; ++e) {
            const int nb = t.n[e];
            if (nb >= 0 && in_bad[nb]) continue;
            ring.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
        }
    }
    // Cavity must be a simple disk (Euler: T == ring - 2) and star-shaped
    // around p; otherwise refuse the point rather than corrupt the mesh.
    bool ok = bad.size() == ring.size() - 2;
    for (const BEdge& be : ring)
        ok = ok && orient2d(points_[be.a], points_[be.b], p) > 0.0;
    if (!ok) {
        if (must_succeed) throw SingularSystem("point insertion produced invalid cavity");
        return -1;
    }

    const int pi = static_cast<int>(points_.size());
    points_.push_back(p);
    vertex_tri_.push_back(-1);
    for (const int ti : bad) tris_[ti].alive = false;

    // One new triangle (a, b, p) per ring edge. Slots: n[0] across (b,p),
    // n[1] across (p,a), n[2] across (a,b) = old outside neighbor.
    std::vector<int> created;
    created.reserve(ring.size());
    std::vector<std::pair<int, int>> by_first;  // ring-edge first vertex -> tri
    for (const BEdge& be : ring) {
        const int nt = static_cast<int>(tris_.size());
        tris_.push_back({{be.a, be.b, pi}, {-1, -1, be.outside}, true});
        if (be.outside >= 0) {
            Tri& out = tris_[be.outside];
            for (int e = 0; e < 3; ++e) {
                const int va = out.v[(e + 1) % 3];
                const int vb = out.v[(e + 2) % 3];
                if ((va == be.a && vb == be.b) || (va == be.b && vb == be.a)) out.n[e] = nt;
            }
        }
        created.push_back(nt);
        by_first.emplace_back(be.a, nt);
    }
    std::sort(by_first.begin(), by_first.end());
    auto tri_starting_at = [&](int v) {
        const auto it = std::lower_bound(by_first.begin(), by_first.end(), std::make_pair(v, -1));
        return it->second;
    };
    for (const int nt : created) {
        Tri& t = tris_[nt];
        t.n[0] = tri_starting_at(t.v[1]);  // shares edge (b, p)
    }
    for (const int nt : created) {
        // The triangle across (p, a) is the one whose n[0] points here.
        tris_[tris_[nt].n[0]].n[1] = nt;
    }
    for (const int nt : created) {
        vertex_tri_[tris_[nt].v[0]] = nt;
        vertex_tri_[tris_[nt].v[1]] = nt;
    }
    vertex_tri_[pi] = created.front();
    last_tri_ = created.front();
    return pi;
}

int Delaunay::tri_edge_index(const Tri& t, int a, int b) const {
    for (int e = 0; e < 3; ++e) {
        const int va = t.v[(e + 1) % 3];
        const int vb = t.v[(e + 2) % 3];
        if ((va == a && vb == b) || (va == b && vb == a)) return e;
    }
    return -1;
}

int Delaunay::find_triangle_with_edge(int a, int b) const {
    const int start = vertex_tri_[a];
    if (start < 0) return -1;
    std::vector<int> seen;
    std::vector<int> stack{start};
    while (!stack.empty()) {
        const int ti = stack.back();
        stack.pop_back();
        if (ti < 0 || !tris_[ti].alive) continue;
        if (std::find(seen.begin(), seen.end(), ti) != seen.end()) continue;
        seen.push_back(ti);
        const Tri& t = tris_[ti];
        int local = -1;
        for (int k = 0; k < 3; ++k)
            if (t.v[k] == a) local = k;
        if (local < 0) continue;
        if (tri_edge_index(t, a, b) >= 0) return ti;
        for (int e = 0; e < 3; ++e)
            if (e != local) stack.push_back(t.n[e]);
    }
    return -1;
}

bool Delaunay::edge_exists(int a, int b) const { return find_triangle_with_edge(a, b) >= 0; }

void Delaunay::flip(int t_idx, int edge) {
    // Quad c-a-d-b (CCW): t = (.., a, b) with apex c, o across (a, b) with
    // apex d. Replace diagonal (a, b) by (c, d).
    const Tri told = tris_[t_idx];
    const int o_idx = told.n[edge];
    const Tri oold = tris_[o_idx];
    const int c = told.v[edge];
    const int a = told.v[(edge + 1) % 3];
    const int b = told.v[(edge + 2) % 3];
    const int oe = tri_edge_index(oold, a, b);
    const int d = oold.v[oe];

    int idx_a_t = -1, idx_b_t = -1, idx_a_o = -1, idx_b_o = -1;
    for (int k = 0; k < 3; ++k) {
        if (told.v[k] == a) idx_a_t = k;
        if (told.v[k] == b) idx_b_t = k;
        if (oold.v[k] == a) idx_a_o = k;
        if (oold.v[k] == b) idx_b_o = k;
    }
    const int n_ca = told.n[idx_b_t];  // across (c, a)
    const int n_bc = told.n[idx_a_t];  // across (b, c)
    const int n_ad = oold.n[idx_b_o];  // across (a, d)
    const int n_db = oold.n[idx_a_o];  // across (d, b)

    tris_[t_idx] = {{c, a, d}, {n_ad, o_idx, n_ca}, true};
    tris_[o_idx] = {{c, d, b}, {n_db, n_bc, t_idx}, true};

    auto fix = [&](int nb, int va, int vb, int self) {
        if (nb < 0) return;
        const int e = tri_edge_index(tris_[nb], va, vb);
        if (e >= 0) tris_[nb].n[e] = self;
    };
    fix(n_ad, a, d, t_idx);
    fix(n_ca, c, a, t_idx);
    fix(n_db, d, b, o_idx);
    fix(n_bc, b, c, o_idx);
    vertex_tri_[a] = t_idx;
    vertex_tri_[c] = t_idx;
    vertex_tri_[d] = o_idx;
    vertex_tri_[b] = o_idx;
}

void Delaunay::insert_constraint(int a, int b) {
    for (int iter = 0; iter < 4096; ++iter) {
        if (edge_exists(a, b)) {
            constraints_.insert(edge_key(a, b));
            return;
        }
        const Vec2 pa = points_[a];
        const Vec2 pb = points_[b];
        bool flipped = false;
        for (std::size_t ti = 0; ti < tris_.size() && !flipped; ++ti) {
            if (!tris_[ti].alive) continue;
            const Tri& t = tris_[ti];
            for (int e = 0; e < 3 && !flipped; ++e) {
                const int va = t.v[(e + 1) % 3];
                const int vb = t.v[(e + 2) % 3];
                if (va == a || vb == a || va == b || vb == b) continue;
                if (t.n[e] < 0) continue;
                const Vec2& qa = points_[va];
                const Vec2& qb = points_[vb];
                const bool crosses =
                    ((orient2d(pa, pb, qa) > 0.0) != (orient2d(pa, pb, qb) > 0.0)) &&
                    ((orient2d(qa, qb, pa) > 0.0) != (orient2d(qa, qb, pb) > 0.0));
                if (!crosses) continue;
                if (is_constrained(va, vb)) throw SingularSystem("crossing constrained edges");
                const Tri& o = tris_[t.n[e]];
                const int oe = tri_edge_index(o, va, vb);
                const Vec2& pc = points_[t.v[e]];
                const Vec2& pd = points_[o.v[oe]];
                // Flip only when the quad is convex.
                if ((orient2d(pc, pd, qa) > 0.0) == (orient2d(pc, pd, qb) > 0.0)) {
                    flip(static_cast<int>(ti), e);
                    flipped = true;
                }
            }
        }
        if (!flipped) throw SingularSystem("constraint edge recovery stalled");
    }
    throw SingularSystem("constraint edge recovery failed");
}

void Delaunay::finalize(std::vector<int>& old_to_new) {
    std::vector<char> outside(tris_.size(), 0);
    std::vector<int> stack;
    for (std::size_t ti = 0; ti < tris_.size(); ++ti) {
        if (!tris_[ti].alive) continue;
        const Tri& t = tris_[ti];
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) {
            outside[ti] = 1;
            stack.push_back(static_cast<int>(ti));
        }
    }
    while (!stack.empty()) {
        const int ti = stack.back();
        stack.pop_back();
        const Tri& t = tris_[ti];
        for (int e = 0; e < 3; ++e) {
            const int nb = t.n[e];
            if (nb < 0 || outside[nb] || !tris_[nb].alive) continue;
            if (is_constrained(t.v[(e + 1) % 3], t.v[(e + 2) % 3])) continue;
            outside[nb] = 1;
            stack.push_back(nb);
        }
    }
    std::vector<Tri> kept;
    for (std::size_t ti = 0; ti < tris_.size(); ++ti)
        if (tris_[ti].alive && !outside[ti]) kept.push_back(tris_[ti]);

    std::vector<char> used(points_.size(), 0);
    for (const Tri& t : kept)
        for (const int v : t.v) used[v] = 1;
    old_to_new.assign(points_.size(), -1);
    std::vector<Vec2> new_points;
    for (std::size_t v = 0; v < points_.size(); ++v)
        if (used[v]) {
            old_to_new[v] = static_cast<int>(new_points.size());
            new_points.push_back(points_[v]);
        }
    for (Tri& t : kept) {
        for (int k = 0; k < 3; ++k) t.v[k] = old_to_new[t.v[k]];
        t.n[0] = t.n[1] = t.n[2] = -1;
    }
    points_ = std::move(new_points);
    tris_ = std::move(kept);
    std::unordered_set<long long> remapped;
    for (const long long key : constraints_) {
        const int a = old_to_new[static_cast<int>(key >> 32)];
        const int b = old_to_new[static_cast<int>(key & 0xffffffffLL)];
        if (a >= 0 && b >= 0) remapped.insert(edge_key(a, b));
    }
    constraints_ = std::move(remapped);
    finalized_ = true;
}

}  // namespace eis
