#pragma once

#include <unordered_set>
#include <vector>

#include "eis/geometry.hpp"

namespace eis {

// Incremental Bowyer-Watson Delaunay triangulation with constrained edges.
// Deterministic: results depend only on insertion order. Intended point sets
// are well spaced, so constraint edges are normally already Delaunay (Gabriel
// edges); flip-based recovery is the fallback.
class Delaunay {
  public:
    struct Tri {
        int v[3];  // CCW
        int n[3];  // neighbor opposite v[i], -1 at hull
        bool alive = true;
    };

    // All inserted points must satisfy |p| <= span.
    explicit Delaunay(double span);

    // Returns the point index, or -1 if the insertion failed the cavity
    // validation (caller may skip optional points). must_succeed makes a
    // failure throw instead.
    int insert(const Vec2& p, bool must_succeed);

    // Ensures edge (a, b) is present and marks it constrained.
    void insert_constraint(int a, int b);

    bool edge_exists(int a, int b) const;

    // Removes everything reachable from the super-triangle without crossing a
    // constrained edge, drops the super vertices, and compacts indices.
    // old_to_new maps pre-finalize point ids (-1 when dropped).
    void finalize(std::vector<int>& old_to_new);

    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<Tri>& triangles() const { return tris_; }
    bool is_constrained(int a, int b) const;

  private:
    std::vector<Vec2> points_;
    std::vector<Tri> tris_;
    std::vector<int> vertex_tri_;  // some alive triangle touching the vertex
    std::unordered_set<long long> constraints_;
    int last_tri_ = 0;
    bool finalized_ = false;

    static long long edge_key(int a, int b);
    int locate(const Vec2& p) const;
    bool in_circumcircle(const Tri& t, const Vec2& p) const;
    int tri_edge_index(const Tri& t, int a, int b) const;
    void flip(int t_idx, int edge);
    int find_triangle_with_edge(int a, int b) const;
};

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace eis
