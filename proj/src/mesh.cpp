#include "hestondg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace hestondg {

namespace {

inline std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

inline double cross2(const Eigen::Vector2d& u, const Eigen::Vector2d& w) {
    return u[0] * w[1] - u[1] * w[0];
}

}  // namespace

Mesh::Mesh(Domain domain, std::vector<Eigen::Vector2d> vertices,
           std::vector<std::array<int, 3>> triangles)
    : domain_(domain), vertices_(std::move(vertices)) {
    domain_.validate();
    if (triangles.empty()) throw std::invalid_argument("Mesh: no triangles");
    tris_.reserve(triangles.size());
    total_area_ = 0.0;
    min_angle_ = M_PI;
    for (const auto& t : triangles) {
        Triangle tri;
        tri.v = t;
        const Eigen::Vector2d& p0 = vertices_[t[0]];
        const Eigen::Vector2d& p1 = vertices_[t[1]];
        const Eigen::Vector2d& p2 = vertices_[t[2]];
        const double a2 = cross2(p1 - p0, p2 - p0);
        if (a2 <= 0.0) throw std::invalid_argument("Mesh: non-positive triangle orientation");
        tri.area = 0.5 * a2;
        const double l0 = (p1 - p0).norm(), l1 = (p2 - p1).norm(), l2 = (p0 - p2).norm();
        tri.diameter = std::max({l0, l1, l2});
        // smallest angle via law of cosines
        auto ang = [](double a, double b, double c) {
            return std::acos(std::clamp((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0));
        };
        min_angle_ = std::min({min_angle_, ang(l0, l1, l2), ang(l1, l2, l0), ang(l2, l0, l1)});
        total_area_ += tri.area;
        tris_.push_back(tri);
    }
    build_topology();
    build_locator();
}

void Mesh::build_topology() {
    std::map<std::uint64_t, int> index;
    edges_.clear();
    tri_edges_.assign(tris_.size(), {-1, -1, -1});
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& v = tris_[t].v;
        for (int k = 0; k < 3; ++k) {
            const int a = v[k], b = v[(k + 1) % 3];
            const auto key = edge_key(a, b);
            auto it = index.find(key);
            if (it == index.end()) {
                MeshEdge e;
                e.a = std::min(a, b);
                e.b = std::max(a, b);
                e.tri[0] = t;
                index.emplace(key, static_cast<int>(edges_.size()));
                tri_edges_[t][k] = static_cast<int>(edges_.size());
                edges_.push_back(e);
            } else {
                MeshEdge& e = edges_[it->second];
                if (e.tri[1] >= 0)
                    throw std::invalid_argument("Mesh: edge shared by more than two triangles");
                e.tri[1] = t;
                tri_edges_[t][k] = it->second;
            }
        }
    }
    const double tol_v = 1e-10 * std::max(1.0, domain_.v_extent());
    const double tol_x = 1e-10 * std::max(1.0, domain_.x_extent());
    for (MeshEdge& e : edges_) {
        const Eigen::Vector2d& pa = vertices_[e.a];
        const Eigen::Vector2d& pb = vertices_[e.b];
        e.length = (pb - pa).norm();
        // unit normal out of tri[0]
        Eigen::Vector2d tangent = (pb - pa) / e.length;
        Eigen::Vector2d n(tangent[1], -tangent[0]);
        const auto& tv = tris_[e.tri[0]].v;
        Eigen::Vector2d centroid =
            (vertices_[tv[0]] + vertices_[tv[1]] + vertices_[tv[2]]) / 3.0;
        if (n.dot(0.5 * (pa + pb) - centroid) < 0.0) n = -n;
        e.normal = n;
        if (e.is_boundary()) {
            if (std::abs(pa[0] - domain_.v_min) < tol_v && std::abs(pb[0] - domain_.v_min) < tol_v)
                e.side = int(Side::VMin);
            else if (std::abs(pa[0] - domain_.v_max) < tol_v && std::abs(pb[0] - domain_.v_max) < tol_v)
                e.side = int(Side::VMax);
            else if (std::abs(pa[1] - domain_.x_min) < tol_x && std::abs(pb[1] - domain_.x_min) < tol_x)
                e.side = int(Side::XMin);
            else if (std::abs(pa[1] - domain_.x_max) < tol_x && std::abs(pb[1] - domain_.x_max) < tol_x)
                e.side = int(Side::XMax);
            else
                throw std::invalid_argument("Mesh: boundary edge not on a domain side");
        }
    }
}

void Mesh::build_locator() {
    grid_n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_triangles()) / 2.0)));
    grid_cells_.assign(static_cast<std::size_t>(grid_n_) * grid_n_, {});
    const double dv = domain_.v_extent() / grid_n_;
    const double dx = domain_.x_extent() / grid_n_;
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& v = tris_[t].v;
        double v_lo = domain_.v_max, v_hi = domain_.v_min;
        double x_lo = domain_.x_max, x_hi = domain_.x_min;
        for (int k = 0; k < 3; ++k) {
            v_lo = std::min(v_lo, vertices_[v[k]][0]);
            v_hi = std::max(v_hi, vertices_[v[k]][0]);
            x_lo = std::min(x_lo, vertices_[v[k]][1]);
            x_hi = std::max(x_hi, vertices_[v[k]][1]);
        }
        auto clampi = [&](int i) { return std::clamp(i, 0, grid_n_ - 1); };
        const int i0 = clampi(static_cast<int>((v_lo - domain_.v_min) / dv));
        const int i1 = clampi(static_cast<int>((v_hi - domain_.v_min) / dv));
        const int j0 = clampi(static_cast<int>((x_lo - domain_.x_min) / dx));
        const int j1 = clampi(static_cast<int>((x_hi - domain_.x_min) / dx));
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                grid_cells_[static_cast<std::size_t>(i) * grid_n_ + j].push_back(t);
    }
    for (auto& cell : grid_cells_) std::sort(cell.begin(), cell.end());
}

int Mesh::locate(double v, double x) const {
    const double scale = std::max(domain_.v_extent(), domain_.x_extent());
    const double tol = 1e-12 * scale;
    if (v < domain_.v_min - tol || v > domain_.v_max + tol || x < domain_.x_min - tol ||
        x > domain_.x_max + tol)
        return -1;
    const double dv = domain_.v_extent() / grid_n_;
    const double dx = domain_.x_extent() / grid_n_;
    const int i = std::clamp(static_cast<int>((v - domain_.v_min) / dv), 0, grid_n_ - 1);
    const int j = std::clamp(static_cast<int>((x - domain_.x_min) / dx), 0, grid_n_ - 1);
    const Eigen::Vector2d p(v, x);
    for (int t : grid_cells_[static_cast<std::size_t>(i) * grid_n_ + j]) {
        const auto& tv = tris_[t].v;
        const Eigen::Vector2d& p0 = vertices_[tv[0]];
        const Eigen::Vector2d& p1 = vertices_[tv[1]];
        const Eigen::Vector2d& p2 = vertices_[tv[2]];
        const double a2 = 2.0 * tris_[t].area;
        const double l1 = cross2(p1 - p0, p - p0) / a2;
        const double l2 = cross2(p - p0, p2 - p0) / a2;
        const double btol = 1e-12 + tol / std::sqrt(a2);
        if (l1 >= -btol && l2 >= -btol && l1 + l2 <= 1.0 + btol) return t;
    }
    return -1;
}

Mesh uniform_mesh(const Domain& d, int n_v, int n_x) {
    d.validate();
    if (n_v < 1 || n_x < 1) throw std::invalid_argument("uniform_mesh: counts must be >= 1");
    std::vector<Eigen::Vector2d> verts;
    verts.reserve(static_cast<std::size_t>(n_v + 1) * (n_x + 1));
    const double dv = d.v_extent() / n_v;
    const double dx = d.x_extent() / n_x;
    for (int i = 0; i <= n_v; ++i)
        for (int j = 0; j <= n_x; ++j)
            verts.emplace_back(d.v_min + i * dv, d.x_min + j * dx);
    auto vid = [n_x](int i, int j) { return i * (n_x + 1) + j; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(2u * n_v * n_x);
    for (int i = 0; i < n_v; ++i) {
        for (int j = 0; j < n_x; ++j) {
            const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), e = vid(i, j + 1);
            // both triangles keep the cell diagonal (a,c) as refinement edge
            tris.push_back({c, a, b});
            tris.push_back({a, c, e});
        }
    }
    return Mesh(d, std::move(verts), std::move(tris));
}

namespace {

struct WorkTri {
    std::array<int, 3> v;  // (base0, base1, peak)
    bool alive = true;
};

class Bisector {
  public:
    Bisector(const Mesh& m)
        : verts_(m.vertices()) {
        tris_.reserve(m.triangles().size() * 2);
        for (const auto& t : m.triangles()) tris_.push_back({t.v, true});
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) register_tri(t);
    }

    void refine_marked(const std::vector<int>& marked) {
        for (int t : marked) {
            if (t < 0 || t >= static_cast<int>(tris_.size()))
                throw std::invalid_argument("refine: marked id out of range");
        }
        for (int t : marked) {
            if (!tris_[t].alive) continue;  // already split by closure
            refine_tri(t);
        }
    }

    std::vector<Eigen::Vector2d> take_vertices() { return std::move(verts_); }
    std::vector<std::array<int, 3>> alive_triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_)
            if (t.alive) out.push_back(t.v);
        return out;
    }

  private:
    std::vector<Eigen::Vector2d> verts_;
    std::vector<WorkTri> tris_;
    // edge -> incident alive triangles (at most two)
    std::unordered_map<std::uint64_t, std::array<int, 2>> edge_tris_;

    void register_tri(int t) {
        const auto& v = tris_[t].v;
        for (int k = 0; k < 3; ++k) add_incidence(v[k], v[(k + 1) % 3], t);
    }

    void add_incidence(int a, int b, int t) {
        auto& slot =
            edge_tris_.try_emplace(edge_key(a, b), std::array<int, 2>{-1, -1}).first->second;
        if (slot[0] == t || slot[1] == t) return;
        if (slot[0] < 0)
            slot[0] = t;
        else if (slot[1] < 0)
            slot[1] = t;
        else
            throw std::runtime_error("refine: edge incident to more than two triangles");
    }

    void remove_incidence(int a, int b, int t) {
        auto it = edge_tris_.find(edge_key(a, b));
        if (it == edge_tris_.end()) return;
        if (it->second[0] == t) it->second[0] = -1;
        if (it->second[1] == t) it->second[1] = -1;
        if (it->second[0] < 0 && it->second[1] < 0) edge_tris_.erase(it);
    }

    int neighbor_across(int t, int a, int b) const {
        auto it = edge_tris_.find(edge_key(a, b));
        if (it == edge_tris_.end()) return -1;
        if (it->second[0] == t) return it->second[1];
        return it->second[0];
    }

    void refine_tri(int t0) {
        // Iterative compatibility chain: a triangle may only be bisected
        // together with its neighbor across the refinement edge.
        std::vector<int> stack{t0};
        std::size_t guard = 0;
        const std::size_t guard_max = 64 * tris_.size() + 1024;
        while (!stack.empty()) {
            if (++guard > guard_max)
                throw std::runtime_error("refine: bisection closure did not terminate");
            const int t = stack.back();
            if (!tris_[t].alive) {
                stack.pop_back();
                continue;
            }
            const auto& v = tris_[t].v;
            const int n = neighbor_across(t, v[0], v[1]);
            if (n >= 0) {
                const auto& w = tris_[n].v;
                const bool compatible = edge_key(w[0], w[1]) == edge_key(v[0], v[1]);
                if (!compatible) {
                    stack.push_back(n);
                    continue;
                }
            }
            bisect_pair(t, n);
            stack.pop_back();
        }
    }

    void bisect_pair(int t, int n) {
        const auto v = tris_[t].v;
        const int mid = static_cast<int>(verts_.size());
        verts_.push_back(0.5 * (verts_[v[0]] + verts_[v[1]]));
        split(t, mid);
        if (n >= 0) split(n, mid);
    }

    void split(int t, int mid) {
        const auto v = tris_[t].v;
        tris_[t].alive = false;
        for (int k = 0; k < 3; ++k) remove_incidence(v[k], v[(k + 1) % 3], t);
        // children keep CCW orientation; their refinement edge is the edge
        // opposite the new (newest) vertex
        const int c1 = static_cast<int>(tris_.size());
        tris_.push_back({{v[2], v[0], mid}, true});
        register_tri(c1);
        const int c2 = static_cast<int>(tris_.size());
        tris_.push_back({{v[1], v[2], mid}, true});
        register_tri(c2);
    }
};

}  // namespace

Mesh refine(const Mesh& m, const std::vector<int>& marked) {
    if (marked.empty()) return m;
    Bisector b(m);
    b.refine_marked(marked);
    auto tris = b.alive_triangles();
    return Mesh(m.domain(), b.take_vertices(), std::move(tris));
}

void write_mesh(std::ostream& os, const Mesh& m) {
    os << "# vertices " << m.vertices().size() << "\n";
    for (const auto& p : m.vertices()) os << p[0] << " " << p[1] << "\n";
    os << "# triangles " << m.n_triangles() << "\n";
    for (const auto& t : m.triangles()) os << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
}

}  // namespace hestondg
