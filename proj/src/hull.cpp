#include "ordertope/hull.hpp"

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>

namespace ordertope::hull {

namespace {

// Rational point in homogeneous integer form: coordinates num[i] / den.
struct HPoint {
  IntegerVector num;
  Integer den;
  std::vector<double> approx;
  bool approx_ok = true;
};

HPoint homogenize(const Point& p) {
  HPoint h;
  h.den = common_denominator(p);
  h.num.reserve(p.size());
  h.approx.reserve(p.size());
  for (const auto& x : p) {
    h.num.push_back(x.get_num() * (h.den / x.get_den()));
    double a = x.get_d();
    if (!std::isfinite(a) || std::fabs(a) > 1e200 || (a == 0 && sgn(x) != 0)) h.approx_ok = false;
    h.approx.push_back(a);
  }
  return h;
}

// (num..., den) identifies a point uniquely.
IntegerVector point_key(const HPoint& p) {
  IntegerVector key = p.num;
  key.push_back(p.den);
  return key;
}

struct FacetRec {
  IntegerVector normal;
  Integer offset;
  std::vector<double> normal_approx;
  double offset_approx = 0;
  bool approx_ok = true;
  std::vector<int> verts;  // sorted vertex ids
  std::vector<int> nbrs;   // ridge-adjacent facets
  bool alive = true;
  bool confirmed = false;
};

struct VertexRec {
  Point point;
  HPoint h;
  std::size_t query = 0;
  int incidence = 0;
  bool alive = true;
};

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Normalized (normal..., offset) of the halfspace normal . x <= level.
IntegerVector support_key(const IntegerVector& normal, const Rational& level) {
  IntegerVector key;
  key.reserve(normal.size() + 1);
  Integer g = 0;
  for (const auto& n : normal) {
    key.push_back(n * level.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), key.back().get_mpz_t());
  }
  key.push_back(level.get_num());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), key.back().get_mpz_t());
  if (g > 1) {
    for (auto& x : key) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  }
  return key;
}

Rational evaluate(const IntegerVector& c, const Point& p) {
  Rational s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * p[i];
  return s;
}

class Builder {
 public:
  Builder(const VertexOracle& oracle, std::size_t dim) : oracle_(oracle), dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("build_hull: dimension must be positive");
  }

  HullPolytope run() {
    bootstrap();
    while (!pending_.empty()) {
      int f = pending_.back();
      pending_.pop_back();
      if (!facets_[f].alive || facets_[f].confirmed) continue;
      Point answer = ask(facets_[f].normal);
      HPoint hp = homogenize(answer);
      int s = side(facets_[f], hp);
      if (s < 0) throw OracleInconsistent("oracle answer does not maximize the queried functional");
      if (auto known = find_vertex(hp)) {
        if (s > 0) throw OracleInconsistent("known vertex reported beyond a facet");
        facets_[f].confirmed = true;
        continue;
      }
      int v = add_vertex(std::move(answer), std::move(hp));
      insert(v);
      // A new vertex on the facet's own hyperplane leaves the facet alive but unproven.
      if (facets_[f].alive) pending_.push_back(f);
    }
    return export_polytope();
  }

 private:
  Point ask(const Functional& c) {
    Point p = oracle_(c);
    if (p.size() != dim_) throw OracleInconsistent("oracle returned a point of the wrong dimension");
    ++queries_;
    return p;
  }

  std::optional<int> find_vertex(const HPoint& h) const {
    auto it = vertex_index_.find(point_key(h));
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
  }

  int add_vertex(Point p, HPoint h) {
    int id = static_cast<int>(verts_.size());
    vertex_index_.emplace(point_key(h), id);
    verts_.push_back(VertexRec{std::move(p), std::move(h), queries_ - 1, 0, true});
    return id;
  }

  int side(const FacetRec& f, const HPoint& p) const {
    if (f.approx_ok && p.approx_ok) {
      double val = -f.offset_approx;
      double mag = std::fabs(f.offset_approx);
      for (std::size_t i = 0; i < dim_; ++i) {
        double t = f.normal_approx[i] * p.approx[i];
        val += t;
        mag += std::fabs(t);
      }
      if (std::isfinite(mag) && std::fabs(val) > 1e-12 * mag + 1e-200) return val > 0 ? 1 : -1;
    }
    Integer s = -f.offset * p.den;
    for (std::size_t i = 0; i < dim_; ++i) s += f.normal[i] * p.num[i];
    return sgn(s);
  }

  linalg::Matrix difference_rows(const std::vector<int>& ids) const {
    const HPoint& p0 = verts_[ids[0]].h;
    linalg::Matrix rows;
    rows.reserve(ids.size() - 1);
    for (std::size_t k = 1; k < ids.size(); ++k) {
      const HPoint& pk = verts_[ids[k]].h;
      RationalVector row(dim_);
      for (std::size_t i = 0; i < dim_; ++i) row[i] = pk.num[i] * p0.den - p0.num[i] * pk.den;
      rows.push_back(std::move(row));
    }
    return rows;
  }

  std::size_t affine_rank(const std::vector<int>& ids) const {
    if (ids.size() <= 1) return 0;
    return linalg::rank(difference_rows(ids), dim_);
  }

  int create_facet(std::vector<int> verts) {
    auto basis = linalg::null_space(difference_rows(verts), dim_);
    if (basis.size() != 1) throw DegenerateInput("facet vertices do not span a hyperplane");
    FacetRec f;
    f.normal = primitive_integer_vector(basis[0]);
    const HPoint& p0 = verts_[verts[0]].h;
    f.offset = 0;
    for (std::size_t i = 0; i < dim_; ++i) f.offset += f.normal[i] * p0.num[i];
    for (auto& n : f.normal) n *= p0.den;
    Integer g = f.offset;
    for (const auto& n : f.normal) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    if (g > 1) {
      for (auto& n : f.normal) mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(f.offset.get_mpz_t(), f.offset.get_mpz_t(), g.get_mpz_t());
    }
    Integer inner = -f.offset * interior_.den;
    for (std::size_t i = 0; i < dim_; ++i) inner += f.normal[i] * interior_.num[i];
    if (sgn(inner) == 0) throw DegenerateInput("interior point lies on a facet hyperplane");
    if (sgn(inner) > 0) {
      for (auto& n : f.normal) n = -n;
      f.offset = -f.offset;
    }
    f.normal_approx.reserve(dim_);
    for (const auto& n : f.normal) {
      double a = n.get_d();
      if (!std::isfinite(a) || std::fabs(a) > 1e200) f.approx_ok = false;
      f.normal_approx.push_back(a);
    }
    f.offset_approx = f.offset.get_d();
    if (!std::isfinite(f.offset_approx) || std::fabs(f.offset_approx) > 1e200) f.approx_ok = false;

    IntegerVector key = f.normal;
    key.push_back(f.offset);
    f.confirmed = supports_.count(key) > 0;
    for (int v : verts) ++verts_[v].incidence;
    f.verts = std::move(verts);
    int id = static_cast<int>(facets_.size());
    facets_.push_back(std::move(f));
    if (!facets_.back().confirmed) pending_.push_back(id);
    return id;
  }

  void kill_facet(int id) {
    FacetRec& f = facets_[id];
    for (int v : f.verts) {
      if (--verts_[v].incidence == 0) verts_[v].alive = false;
    }
    f.alive = false;
    IntegerVector().swap(f.normal);
    std::vector<double>().swap(f.normal_approx);
    std::vector<int>().swap(f.verts);
    std::vector<int>().swap(f.nbrs);
  }

  IntegerVector orthogonal_direction(const std::vector<int>& simplex, std::size_t stage) const {
    linalg::Matrix rows = difference_rows(simplex);
    std::vector<RationalVector> candidates;
    auto unit = [&](std::size_t axis, int sign) {
      RationalVector g(dim_, Rational(0));
      g[axis] = sign;
      return g;
    };
    candidates.push_back(unit(stage % dim_, -1));
    for (std::size_t a = 0; a < dim_; ++a) candidates.push_back(unit(a, -1));
    for (std::size_t a = 0; a < dim_; ++a) candidates.push_back(unit(a, +1));
    for (const auto& g : candidates) {
      RationalVector c = linalg::orthogonal_component(rows, g);
      if (std::any_of(c.begin(), c.end(), [](const Rational& x) { return sgn(x) != 0; })) {
        return primitive_integer_vector(c);
      }
    }
    throw DegenerateInput("no direction orthogonal to the current affine span");
  }

  struct Probe {
    int vertex;
    bool fresh;
    int cmp;  // sign of (functional . answer - level)
  };

  Probe probe(const IntegerVector& c, const Rational& level) {
    Point answer = ask(c);
    int cmp = sgn(evaluate(c, answer) - level);
    if (cmp < 0) throw OracleInconsistent("oracle answer does not maximize the queried functional");
    HPoint h = homogenize(answer);
    if (auto known = find_vertex(h)) return {*known, false, cmp};
    return {add_vertex(std::move(answer), std::move(h)), true, cmp};
  }

  void bootstrap() {
    IntegerVector first(dim_, Integer(0));
    first[0] = -1;
    Point p = ask(first);
    HPoint h = homogenize(p);
    std::vector<int> simplex{add_vertex(std::move(p), std::move(h))};
    std::vector<int> in_span;

    while (simplex.size() <= dim_) {
      const std::size_t stage = simplex.size() - 1;
      IntegerVector c;
      if (stage == 0) {
        c.assign(dim_, Integer(0));
        c[0] = 1;
      } else {
        c = orthogonal_direction(simplex, stage);
      }
      Rational level = evaluate(c, verts_[simplex[0]].point);
      Probe up = probe(c, level);
      if (up.cmp > 0) {
        simplex.push_back(up.vertex);
        continue;
      }
      // Every point satisfies c . x <= level, and the current span sits on it.
      if (up.fresh) {
        in_span.push_back(up.vertex);
      } else {
        supports_.insert(support_key(c, level));
      }
      // the very first query already bounded c from the other side
      if (stage == 0) throw DimensionDeficient(0, dim_);
      for (auto& x : c) x = -x;
      Probe down = probe(c, -level);
      if (down.cmp > 0) {
        simplex.push_back(down.vertex);
        continue;
      }
      throw DimensionDeficient(stage, dim_);
    }

    interior_.den = 1;
    RationalVector centroid(dim_, Rational(0));
    for (int v : simplex) {
      for (std::size_t i = 0; i < dim_; ++i) centroid[i] += verts_[v].point[i];
    }
    for (auto& x : centroid) x /= static_cast<long>(simplex.size());
    interior_ = homogenize(centroid);

    std::vector<int> ids;
    for (std::size_t omit = 0; omit < simplex.size(); ++omit) {
      std::vector<int> verts;
      for (std::size_t k = 0; k < simplex.size(); ++k) {
        if (k != omit) verts.push_back(simplex[k]);
      }
      std::sort(verts.begin(), verts.end());
      ids.push_back(create_facet(std::move(verts)));
    }
    for (int a : ids) {
      for (int b : ids) {
        if (a != b) facets_[a].nbrs.push_back(b);
      }
    }
    for (int v : in_span) insert(v);
  }

  void insert(int vid) {
    const HPoint& hp = verts_[vid].h;
    const std::size_t before = facets_.size();
    std::vector<signed char> state(before, 0);
    std::vector<int> beyond;
    std::vector<int> coplanar;
    for (std::size_t f = 0; f < before; ++f) {
      if (!facets_[f].alive) continue;
      int s = side(facets_[f], hp);
      if (s > 0) {
        state[f] = 1;
        beyond.push_back(static_cast<int>(f));
      } else if (s == 0) {
        state[f] = 2;
        coplanar.push_back(static_cast<int>(f));
      }
    }
    if (beyond.empty()) throw OracleInconsistent("oracle returned a point inside the current hull");

    std::vector<int> around;  // facets through the new vertex
    for (int f : beyond) {
      // copy: create_facet may reallocate facets_
      const std::vector<int> nbrs = facets_[f].nbrs;
      for (int g : nbrs) {
        if (state[g] != 0) continue;
        std::vector<int> ridge = intersect_sorted(facets_[f].verts, facets_[g].verts);
        ridge.push_back(vid);
        int h = create_facet(std::move(ridge));
        facets_[h].nbrs.push_back(g);
        std::replace(facets_[g].nbrs.begin(), facets_[g].nbrs.end(), f, h);
        around.push_back(h);
      }
    }
    for (int g : coplanar) {
      auto& nb = facets_[g].nbrs;
      nb.erase(std::remove_if(nb.begin(), nb.end(), [&](int x) { return x < static_cast<int>(before) && state[x] == 1; }),
               nb.end());
      facets_[g].verts.push_back(vid);
      ++verts_[vid].incidence;
      around.push_back(g);
    }
    for (int f : beyond) kill_facet(f);
    link_around(vid, around);
  }

  bool adjacent(int a, int b) const {
    const auto& nb = facets_[a].nbrs;
    return std::find(nb.begin(), nb.end(), b) != nb.end();
  }

  void link_if_ridge(int fa, int fb) {
    if (adjacent(fa, fb)) return;
    std::vector<int> common = intersect_sorted(facets_[fa].verts, facets_[fb].verts);
    if (common.size() + 2 < dim_ + 1 && dim_ > 1) return;
    if (affine_rank(common) + 2 == dim_ || (dim_ == 1 && common.empty())) {
      facets_[fa].nbrs.push_back(fb);
      facets_[fb].nbrs.push_back(fa);
    }
  }

  // Ridges between facets that contain the new vertex.
  void link_around(int vid, const std::vector<int>& around) {
    if (dim_ <= 2) {
      // ridges are the single vertex vid (or empty), so every pair qualifies
      for (std::size_t a = 0; a < around.size(); ++a) {
        for (std::size_t b = a + 1; b < around.size(); ++b) link_if_ridge(around[a], around[b]);
      }
      return;
    }
    std::unordered_map<int, std::vector<int>> by_vertex;
    for (std::size_t a = 0; a < around.size(); ++a) {
      for (int v : facets_[around[a]].verts) {
        if (v != vid) by_vertex[v].push_back(static_cast<int>(a));
      }
    }
    std::vector<int> count(around.size(), 0);
    std::vector<int> touched;
    const int needed = static_cast<int>(dim_) - 2;  // shared vertices besides vid
    for (std::size_t a = 0; a < around.size(); ++a) {
      touched.clear();
      for (int v : facets_[around[a]].verts) {
        if (v == vid) continue;
        for (int b : by_vertex[v]) {
          if (b <= static_cast<int>(a)) continue;
          if (count[b]++ == 0) touched.push_back(b);
        }
      }
      for (int b : touched) {
        int fa = around[a];
        int fb = around[b];
        if (count[b] >= needed) link_if_ridge(fa, fb);
        count[b] = 0;
      }
    }
  }

  HullPolytope export_polytope() const {
    HullPolytope out;
    out.dim = dim_;
    out.oracle_queries = queries_;
    std::vector<std::size_t> remap(verts_.size(), 0);
    for (std::size_t v = 0; v < verts_.size(); ++v) {
      if (!verts_[v].alive) continue;
      remap[v] = out.vertices.size();
      out.vertices.push_back(verts_[v].point);
      out.discovery_query.push_back(verts_[v].query);
    }
    for (const auto& f : facets_) {
      if (!f.alive) continue;
      if (!f.confirmed) throw std::logic_error("hull build finished with an unconfirmed facet");
      Facet facet;
      facet.normal.reserve(dim_);
      for (const auto& n : f.normal) facet.normal.emplace_back(n);
      facet.offset = f.offset;
      for (int v : f.verts) facet.incident_vertices.push_back(remap[v]);
      out.facets.push_back(std::move(facet));
    }
    return out;
  }

  const VertexOracle& oracle_;
  std::size_t dim_;
  std::size_t queries_ = 0;
  std::vector<VertexRec> verts_;
  std::vector<FacetRec> facets_;
  std::vector<int> pending_;
  std::map<IntegerVector, int> vertex_index_;
  std::set<IntegerVector> supports_;
  HPoint interior_;
};

}  // namespace

HullPolytope build_hull(const VertexOracle& oracle, std::size_t dim) { return Builder(oracle, dim).run(); }

int orientation(std::span<const Point> facet_points, const Point& query) {
  const std::size_t d = query.size();
  if (facet_points.size() != d) throw std::invalid_argument("orientation: need exactly d facet points");
  for (const auto& p : facet_points) {
    if (p.size() != d) throw std::invalid_argument("orientation: dimension mismatch");
  }
  linalg::Matrix spanning;
  for (std::size_t k = 1; k < d; ++k) {
    RationalVector row(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = facet_points[k][i] - facet_points[0][i];
    spanning.push_back(std::move(row));
  }
  if (linalg::rank(spanning, d) + 1 != d) throw DegenerateInput("orientation: facet points are affinely dependent");
  linalg::Matrix m;
  RationalVector first(d);
  for (std::size_t i = 0; i < d; ++i) first[i] = query[i] - facet_points[0][i];
  m.push_back(std::move(first));
  for (auto& row : spanning) m.push_back(std::move(row));
  return sgn(linalg::determinant(std::move(m)));
}

std::vector<std::size_t> visible_facets(const HullPolytope& polytope, const Point& q) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < polytope.facets.size(); ++f) {
    if (dot(polytope.facets[f].normal, q) > polytope.facets[f].offset) out.push_back(f);
  }
  return out;
}

}  // namespace ordertope::hull
