#pragma once

// Triangulated plane domains: structured and notched rectangle generators,
// distance to a polyline (used by the weak-band initial damage), and a plain
// text mesh format with strict validation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace creepdam {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline Vec2 operator*(double a, const Vec2& v) { return v * a; }

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Twice the signed area is the cross product of two edges; positive for a
// counterclockwise vertex order.
inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<double> element_areas;          // cached, one per triangle
  std::vector<int> boundary_nodes;            // sorted, unique
  std::vector<char> on_boundary;              // per-node flag

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(triangles.size()); }
  double total_area() const {
    double a = 0.0;
    for (double e : element_areas) a += e;
    return a;
  }
};

namespace detail {

// Boundary = endpoints of edges that belong to exactly one triangle.
inline void compute_boundary(Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  mesh.on_boundary.assign(mesh.nodes.size(), 0);
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) {
      mesh.on_boundary[edge.first] = 1;
      mesh.on_boundary[edge.second] = 1;
    }
  }
  mesh.boundary_nodes.clear();
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.on_boundary[i]) mesh.boundary_nodes.push_back(i);
}

}  // namespace detail

// Validates connectivity and orientation, caches areas and the boundary set.
inline Mesh make_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles) {
  Mesh mesh;
  mesh.nodes = std::move(nodes);
  mesh.triangles = std::move(triangles);
  const int n = mesh.node_count();
  mesh.element_areas.reserve(mesh.triangles.size());
  for (size_t e = 0; e < mesh.triangles.size(); ++e) {
    const auto& t = mesh.triangles[e];
    for (int v : t)
      if (v < 0 || v >= n)
        throw MeshError("element " + std::to_string(e) + ": node index " + std::to_string(v) +
                        " out of range");
    const double a = signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    if (!(a > 0.0))
      throw MeshError("element " + std::to_string(e) +
                      ": non-positive area (triangles must be counterclockwise and non-degenerate)");
    mesh.element_areas.push_back(a);
  }
  detail::compute_boundary(mesh);
  return mesh;
}

// Right-triangle grid on [0,width] x [0,height]: (nx+1)(ny+1) nodes,
// 2 nx ny elements, each cell split along the (lower-left, upper-right)
// diagonal.
inline Mesh structured_rect_mesh(double width, double height, int nx, int ny) {
  if (!(width > 0.0 && height > 0.0))
    throw std::invalid_argument("structured_rect_mesh: width and height must be > 0");
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("structured_rect_mesh: nx and ny must be >= 1");
  if (static_cast<std::int64_t>(nx + 1) * (ny + 1) > 50'000'000)
    throw std::invalid_argument("structured_rect_mesh: requested node count overflows the sane range");

  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.push_back({width * i / nx, height * j / ny});

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      tris.push_back({n00, n10, n11});
      tris.push_back({n00, n11, n01});
    }
  }
  return make_mesh(std::move(nodes), std::move(tris));
}

// Rectangle with a V-notch cut into the top edge, apex pointing down.
// The structured grid is fitted to the notch by scaling each node column
// vertically, so the topology is identical to structured_rect_mesh and the
// notch apex is always resolved by a node (the apex snaps to the grid column
// nearest to width/2). notch_tip_angle is the full opening angle in radians.
inline Mesh notched_rect_mesh(double width, double height, double notch_depth,
                              double notch_tip_angle, int nx, int ny) {
  if (!(notch_depth >= 0.0 && notch_depth < height))
    throw std::invalid_argument("notched_rect_mesh: notch_depth must lie in [0, height)");
  Mesh mesh = structured_rect_mesh(width, height, nx, ny);
  if (notch_depth == 0.0) return mesh;
  if (!(notch_tip_angle > 0.0 && notch_tip_angle < 3.141592653589793))
    throw std::invalid_argument("notched_rect_mesh: notch_tip_angle must lie in (0, pi)");

  const int ic = std::clamp(static_cast<int>(std::lround(nx / 2.0)), 0, nx);
  const double xc = width * ic / nx;
  const double half_width = notch_depth * std::tan(notch_tip_angle / 2.0);
  for (auto& node : mesh.nodes) {
    const double cut = notch_depth * std::max(0.0, 1.0 - std::abs(node.x - xc) / half_width);
    node.y *= (height - cut) / height;
  }
  // Column scaling keeps every triangle counterclockwise; recompute the
  // cached areas for the deformed coordinates.
  return make_mesh(std::move(mesh.nodes), std::move(mesh.triangles));
}

struct Polyline {
  std::vector<Vec2> points;

  explicit Polyline(std::vector<Vec2> pts) : points(std::move(pts)) {
    if (points.size() < 2)
      throw std::invalid_argument("Polyline: need at least two points");
    for (size_t i = 1; i < points.size(); ++i)
      if ((points[i] - points[i - 1]).norm() == 0.0)
        throw std::invalid_argument("Polyline: consecutive points must be distinct");
  }

  double total_length() const {
    double len = 0.0;
    for (size_t i = 1; i < points.size(); ++i) len += (points[i] - points[i - 1]).norm();
    return len;
  }
};

inline double dist_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squared_norm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline double dist_to_polyline(const Vec2& p, const Polyline& line) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < line.points.size(); ++i)
    d = std::min(d, dist_to_segment(p, line.points[i - 1], line.points[i]));
  return d;
}

// ---------------------------------------------------------------------------
// Text format:
//   nodes N      followed by N lines "x y"
//   elements M   followed by M lines "i j k" (0-based, counterclockwise)
//   boundary K   followed by K node indices
// '#' starts a comment; blank lines are ignored. The stored boundary list
// must match the boundary recomputed from the connectivity.
// ---------------------------------------------------------------------------

inline void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("write_mesh: cannot open '" + path + "'");
  out.precision(17);
  out << "# plane triangle mesh\n";
  out << "nodes " << mesh.node_count() << "\n";
  for (const auto& n : mesh.nodes) out << n.x << " " << n.y << "\n";
  out << "elements " << mesh.element_count() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary " << mesh.boundary_nodes.size() << "\n";
  for (int b : mesh.boundary_nodes) out << b << "\n";
  if (!out) throw MeshError("write_mesh: write to '" + path + "' failed");
}

namespace detail {

// Line-oriented token reader that remembers source positions for error
// messages.
class MeshTokens {
 public:
  MeshTokens(std::istream& in, std::string origin) : in_(in), origin_(std::move(origin)) {}

  // Next whitespace-separated token, skipping blank lines and '#' comments.
  // Returns false at end of input.
  bool next(std::string& tok) {
    while (true) {
      if (line_stream_ >> tok) return true;
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line_stream_ = std::istringstream(line);
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError(origin_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  std::string expect(const std::string& what) {
    std::string tok;
    if (!next(tok)) fail("unexpected end of file, expected " + what);
    return tok;
  }

  double expect_double(const std::string& what) {
    const std::string tok = expect(what);
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("expected " + what + ", got '" + tok + "'");
    }
    if (used != tok.size()) fail("expected " + what + ", got '" + tok + "'");
    return v;
  }

  long expect_int(const std::string& what) {
    const std::string tok = expect(what);
    size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      fail("expected " + what + ", got '" + tok + "'");
    }
    if (used != tok.size()) fail("expected " + what + ", got '" + tok + "'");
    return v;
  }

  void expect_keyword(const std::string& kw) {
    const std::string tok = expect("keyword '" + kw + "'");
    if (tok != kw) fail("expected keyword '" + kw + "', got '" + tok + "'");
  }

 private:
  std::istream& in_;
  std::string origin_;
  int line_no_ = 0;
  std::istringstream line_stream_;
};

}  // namespace detail

inline Mesh read_mesh_stream(std::istream& in, const std::string& origin) {
  detail::MeshTokens tok(in, origin);

  tok.expect_keyword("nodes");
  const long n_nodes = tok.expect_int("node count");
  if (n_nodes < 3) tok.fail("node count must be >= 3");
  std::vector<Vec2> nodes(n_nodes);
  for (long i = 0; i < n_nodes; ++i) {
    nodes[i].x = tok.expect_double("node x coordinate");
    nodes[i].y = tok.expect_double("node y coordinate");
  }

  tok.expect_keyword("elements");
  const long n_elems = tok.expect_int("element count");
  if (n_elems < 1) tok.fail("element count must be >= 1");
  std::vector<std::array<int, 3>> tris(n_elems);
  for (long e = 0; e < n_elems; ++e)
    for (int v = 0; v < 3; ++v) tris[e][v] = static_cast<int>(tok.expect_int("element node index"));

  tok.expect_keyword("boundary");
  const long n_bnd = tok.expect_int("boundary count");
  std::vector<int> boundary(n_bnd);
  for (long b = 0; b < n_bnd; ++b) boundary[b] = static_cast<int>(tok.expect_int("boundary node index"));

  std::string extra;
  if (tok.next(extra)) tok.fail("trailing content '" + extra + "' after boundary list");

  Mesh mesh;
  try {
    mesh = make_mesh(std::move(nodes), std::move(tris));
  } catch (const MeshError& err) {
    throw MeshError(origin + ": " + err.what());
  }
  std::sort(boundary.begin(), boundary.end());
  if (boundary != mesh.boundary_nodes)
    throw MeshError(origin + ": stored boundary list does not match the topological boundary");
  return mesh;
}

inline Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("read_mesh: cannot open '" + path + "'");
  return read_mesh_stream(in, path);
}

}  // namespace creepdam
