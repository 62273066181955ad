#include <catch2/catch_amalgamated.hpp>

#include "latticetodd/fan.hpp"
#include "latticetodd/oracle.hpp"

#include <set>

using namespace latticetodd;

namespace {

LatticePolytope unit_square() {
  return from_halfspaces({{Int(1), Int(0)}, {Int(-1), Int(0)}, {Int(0), Int(1)}, {Int(0), Int(-1)}},
                         {Int(0), Int(1), Int(0), Int(1)});
}

LatticePolytope triangle102() {
  return from_halfspaces({{Int(1), Int(0)}, {Int(0), Int(1)}, {Int(-2), Int(-1)}},
                         {Int(0), Int(0), Int(2)});
}

std::size_t vertex_id_of(const LatticePolytope& p, const QVec& v) {
  for (std::size_t i = 0; i < p.vertices.size(); ++i)
    if (p.vertices[i] == v) return i;
  throw std::runtime_error("vertex not found");
}

}  // namespace

TEST_CASE("normal fan of the square and triangle") {
  LatticePolytope sq = unit_square();
  NormalFan nf = normal_fan(sq);
  std::set<IVec> rays;
  for (const IVec& u : sq.normals) rays.insert(u);
  REQUIRE(rays == std::set<IVec>{{Int(1), Int(0)}, {Int(-1), Int(0)}, {Int(0), Int(1)}, {Int(0), Int(-1)}});
  std::size_t two_dim = 0;
  for (const Face& f : sq.faces)
    if (f.dim == 0) {
      REQUIRE(nf.cone_of_face(&f - sq.faces.data()).dim() == 2);
      ++two_dim;
    }
  REQUIRE(two_dim == 4);

  LatticePolytope tri = triangle102();
  std::set<IVec> trays(tri.normals.begin(), tri.normals.end());
  REQUIRE(trays == std::set<IVec>{{Int(1), Int(0)}, {Int(0), Int(1)}, {Int(-2), Int(-1)}});
}

TEST_CASE("tangent cones") {
  LatticePolytope sq = unit_square();
  Cone c00 = tangent_cone(sq, vertex_id_of(sq, {Rational(0), Rational(0)}));
  std::set<IVec> g(c00.generators.begin(), c00.generators.end());
  REQUIRE(g == std::set<IVec>{{Int(1), Int(0)}, {Int(0), Int(1)}});
  Cone c11 = tangent_cone(sq, vertex_id_of(sq, {Rational(1), Rational(1)}));
  std::set<IVec> g11(c11.generators.begin(), c11.generators.end());
  REQUIRE(g11 == std::set<IVec>{{Int(-1), Int(0)}, {Int(0), Int(-1)}});

  LatticePolytope tri = triangle102();
  Cone c10 = tangent_cone(tri, vertex_id_of(tri, {Rational(1), Rational(0)}));
  std::set<IVec> g10(c10.generators.begin(), c10.generators.end());
  REQUIRE(g10 == std::set<IVec>{{Int(-1), Int(0)}, {Int(-1), Int(2)}});
}

TEST_CASE("tangent cone is dual to the normal-fan vertex cone") {
  for (const LatticePolytope& p : {unit_square(), triangle102()}) {
    for (std::size_t v = 0; v < p.vertices.size(); ++v) {
      Cone tc = tangent_cone(p, v);
      std::vector<IVec> gens;
      for (std::size_t a : p.vertex_active[v]) gens.push_back(p.normals[a]);
      Cone sigma = Cone::make(gens, false);
      std::set<IVec> duals;
      for (const IVec& d : dual_cone_generators(sigma)) duals.insert(d);
      std::set<IVec> tgens(tc.generators.begin(), tc.generators.end());
      REQUIRE(duals == tgens);
    }
  }
}

TEST_CASE("dual of dual is the identity on pointed full-dimensional cones") {
  std::vector<Cone> cones = {
      Cone::make({{Int(1), Int(0)}, {Int(0), Int(1)}}, false),
      Cone::make({{Int(1), Int(0)}, {Int(1), Int(2)}}, false),
      Cone::make({{Int(0), Int(1)}, {Int(-2), Int(-1)}}, false),
      Cone::make({{Int(1), Int(0), Int(0)}, {Int(0), Int(1), Int(0)}, {Int(0), Int(0), Int(1)}},
                 false),
      Cone::make({{Int(1), Int(1), Int(0)}, {Int(0), Int(1), Int(1)}, {Int(1), Int(0), Int(1)}},
                 false)};
  for (const Cone& c : cones) {
    Cone dual = Cone::make(dual_cone_generators(c), !c.m_side);
    Cone ddual = Cone::make(dual_cone_generators(dual), c.m_side);
    std::set<IVec> a(c.generators.begin(), c.generators.end());
    std::set<IVec> b(ddual.generators.begin(), ddual.generators.end());
    REQUIRE(a == b);
  }
}

TEST_CASE("multiplicity spec examples") {
  REQUIRE(multiplicity(Cone::make({{Int(1), Int(0)}, {Int(0), Int(1)}}, false)) == 1);
  REQUIRE(multiplicity(Cone::make({{Int(-1), Int(0)}, {Int(-1), Int(2)}}, true)) == 2);
  REQUIRE(multiplicity(Cone::make(
              {{Int(1), Int(1), Int(0)}, {Int(0), Int(1), Int(1)}, {Int(1), Int(0), Int(1)}},
              false)) == 2);
}

TEST_CASE("group_data spec examples") {
  // smooth cone: only the identity
  auto smooth = group_data(Cone::make({{Int(1), Int(0)}, {Int(0), Int(1)}}, false));
  REQUIRE(smooth.size() == 1);
  REQUIRE(smooth[0].identity());
  REQUIRE(g_circ(Cone::make({{Int(1), Int(0)}, {Int(0), Int(1)}}, false)).empty());

  // Cone((-1,0),(-1,2)): two elements, the non-identity has gamma = (1/2,1/2)
  auto g = group_data(Cone::make({{Int(-1), Int(0)}, {Int(-1), Int(2)}}, false));
  REQUIRE(g.size() == 2);
  REQUIRE(g[0].identity());
  REQUIRE(g[1].gamma == QVec{Rational(1, 2), Rational(1, 2)});
}

TEST_CASE("multiplicity equals group order; G_sigma partitions into G_circ of faces") {
  std::vector<Cone> cones = {
      Cone::make({{Int(0), Int(1)}, {Int(-2), Int(-1)}}, false),
      Cone::make({{Int(1), Int(0)}, {Int(1), Int(4)}}, false),
      Cone::make({{Int(2), Int(-1)}, {Int(0), Int(1)}}, false),
      Cone::make({{Int(0), Int(1), Int(0)}, {Int(0), Int(0), Int(1)}, {Int(-2), Int(-2), Int(-1)}},
                 false)};
  for (const Cone& c : cones) {
    auto g = group_data(c);
    REQUIRE(Int(g.size()) == multiplicity(c));
    std::size_t identity_count = 0;
    for (const auto& e : g) identity_count += e.identity() ? 1 : 0;
    REQUIRE(identity_count == 1);
    // partition: every element belongs to G_circ of exactly one face,
    // the face spanned by the rays where its character is nontrivial
    std::size_t total = 0;
    std::size_t k = c.generators.size();
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<IVec> sub;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) sub.push_back(c.generators[i]);
      std::size_t cnt;
      if (sub.empty()) {
        cnt = 1;  // trivial face contributes the identity
      } else {
        cnt = g_circ(Cone::make(sub, c.m_side)).size();
      }
      total += cnt;
    }
    REQUIRE(total == g.size());
  }
}

TEST_CASE("unimodular subdivision spec examples") {
  Cone smooth = Cone::make({{Int(1), Int(0)}, {Int(0), Int(1)}}, true);
  auto pieces = unimodular_subdivide(smooth);
  REQUIRE(pieces.size() == 1);

  Cone c12 = Cone::make({{Int(1), Int(0)}, {Int(1), Int(2)}}, true);
  auto p12 = unimodular_subdivide(c12);
  REQUIRE(p12.size() == 2);
  std::set<std::set<IVec>> expect12 = {{{Int(1), Int(0)}, {Int(1), Int(1)}},
                                       {{Int(1), Int(1)}, {Int(1), Int(2)}}};
  std::set<std::set<IVec>> got12;
  for (const Cone& p : p12) got12.insert({p.generators.begin(), p.generators.end()});
  REQUIRE(got12 == expect12);

  Cone c14 = Cone::make({{Int(1), Int(0)}, {Int(1), Int(4)}}, true);
  auto p14 = unimodular_subdivide(c14);
  REQUIRE(p14.size() == 4);
  for (const Cone& p : p14) REQUIRE(multiplicity(p) == 1);
}

TEST_CASE("half-open cover is a disjoint exact tiling") {
  std::vector<Cone> cones = {
      Cone::make({{Int(1), Int(0)}, {Int(1), Int(2)}}, true),
      Cone::make({{Int(1), Int(0)}, {Int(1), Int(4)}}, true),
      Cone::make({{Int(1), Int(0)}, {Int(2), Int(3)}}, true),
      Cone::make({{Int(1), Int(0), Int(0)}, {Int(0), Int(1), Int(0)}, {Int(1), Int(1), Int(2)}},
                 true)};
  for (const Cone& c : cones) {
    auto pieces = unimodular_subdivide(c);
    auto cover = half_open_cover(c, pieces);
    // single smooth cone: nothing removed
    if (pieces.size() == 1) REQUIRE(cover[0].removed.empty());
    // brute check over a box: every cone point lands in exactly one piece
    Int bound = c.n == 2 ? 6 : 4;
    oracle::BoundingBox box{IVec(c.n, 0), IVec(c.n, bound)};
    box.scan([&](const IVec& m) {
      QVec q = to_qvec(m);
      int count_parent = cone_contains(c, q) ? 1 : 0;
      int count_pieces = 0;
      for (const HalfOpenPiece& hp : cover) {
        auto lam = simplicial_coordinates(hp.cone, q);
        if (!lam) continue;
        bool in = true;
        for (std::size_t j = 0; j < lam->size(); ++j) {
          bool removed = std::find(hp.removed.begin(), hp.removed.end(), j) != hp.removed.end();
          in = in && (removed ? (*lam)[j] > 0 : (*lam)[j] >= 0);
        }
        count_pieces += in ? 1 : 0;
      }
      REQUIRE(count_parent == count_pieces);
    });
  }
}

TEST_CASE("star fans") {
  LatticePolytope sq = unit_square();
  // sigma = {0}: star fan is the fan itself
  std::size_t whole = sq.whole_face_index();
  StarFan sf0 = star_fan(sq, whole);
  REQUIRE(sf0.q == 2);
  REQUIRE(sf0.rays.size() == 4);
  REQUIRE(sf0.cones.size() == sq.faces.size());

  // right edge of the square: fan of a toric line, two opposite rays in Z^1
  for (std::size_t fi = 0; fi < sq.faces.size(); ++fi) {
    const Face& f = sq.faces[fi];
    if (f.dim != 1) continue;
    StarFan sf = star_fan(sq, fi);
    REQUIRE(sf.q == 1);
    REQUIRE(sf.rays.size() == 2);
    std::set<IVec> imgs{sf.rays[0].image, sf.rays[1].image};
    REQUIRE(imgs == std::set<IVec>{{Int(1)}, {Int(-1)}});
    REQUIRE(sf.rays[0].multiplier == 1);
    REQUIRE(sf.rays[1].multiplier == 1);
  }

  // vertex cone: trivial fan over the rank-0 lattice
  StarFan sfv = star_fan(sq, 0);
  REQUIRE(sq.faces[0].dim == 0);
  REQUIRE(sfv.q == 0);
  REQUIRE(sfv.rays.empty());
}

TEST_CASE("star ray multiplier detects non-primitive images") {
  // polygon with facets x+2y <= 2 (u=(-1,-2)) and y <= 1 meeting an edge whose
  // quotient image of an adjacent ray is divisible
  // use sigma_E = ray (2,1): quotient Z^2/(2,1) = Z via (a,b) -> a-2b
  LatticePolytope p = from_halfspaces(
      {{Int(2), Int(1)}, {Int(0), Int(1)}, {Int(-1), Int(0)}, {Int(0), Int(-1)}, {Int(1), Int(0)}},
      {Int(0), Int(0), Int(4), Int(3), Int(1)});
  REQUIRE(is_simple(p));
  for (std::size_t fi = 0; fi < p.faces.size(); ++fi) {
    const Face& f = p.faces[fi];
    if (f.dim != 1 || f.active != std::vector<std::size_t>{0}) continue;
    StarFan sf = star_fan(p, fi);
    REQUIRE(sf.q == 1);
    bool saw_multiplier = false;
    for (const auto& ray : sf.rays) saw_multiplier = saw_multiplier || ray.multiplier > 1;
    REQUIRE(saw_multiplier);
  }
}

TEST_CASE("fibration multiplicities: ample divisor is the identity fibration") {
  LatticePolytope sq = unit_square();
  IVec dp(sq.facet_count());
  for (std::size_t i = 0; i < dp.size(); ++i) dp[i] = num(sq.offsets[i]);
  FibrationData fd = fibration_multiplicities(sq, dp);
  REQUIRE(fd.p_dprime.vertices == sq.vertices);
  for (const auto& [key, count] : fd.d) {
    REQUIRE(key.second == 0);
    REQUIRE(count == 1);
  }
  REQUIRE(fd.d.size() == sq.faces.size());
}

TEST_CASE("fibration multiplicities: zero divisor counts orbits by dimension") {
  LatticePolytope sq = unit_square();
  FibrationData fd = fibration_multiplicities(sq, IVec(4, 0));
  REQUIRE(fd.p_dprime.degenerate);
  REQUIRE(fd.p_dprime.vertices.size() == 1);
  // d_ell(X/{0}) = number of ell-dimensional torus orbits
  //             = number of (n-ell)-dimensional cones = faces of dim ell
  std::map<int, Int> by_ell;
  for (const auto& [key, count] : fd.d) by_ell[key.second] += count;
  REQUIRE(by_ell[0] == 4);  // vertices
  REQUIRE(by_ell[1] == 4);  // edges
  REQUIRE(by_ell[2] == 1);  // whole polytope
}

TEST_CASE("fibration multiplicities: square onto a segment") {
  LatticePolytope sq = unit_square();
  // divisor supported on the x facets only: P_{D'} is the segment [0,1] x {0}
  FibrationData fd = fibration_multiplicities(sq, IVec{Int(0), Int(1), Int(0), Int(0)});
  REQUIRE(fd.p_dprime.degenerate);
  REQUIRE(fd.p_dprime.vertices.size() == 2);
  Int total = 0;
  for (const auto& [key, count] : fd.d) total += count;
  REQUIRE(total == Int(sq.faces.size()));  // 9 cones distributed over 3 faces
}

TEST_CASE("rigidity: alternating d_ell sums to 1 per target face") {
  LatticePolytope sq = unit_square();
  LatticePolytope hex = from_vertices({{Int(1), Int(0)}, {Int(0), Int(1)}, {Int(-1), Int(1)},
                                       {Int(-1), Int(0)}, {Int(0), Int(-1)}, {Int(1), Int(-1)}});
  std::vector<std::pair<const LatticePolytope*, IVec>> cases;
  IVec sq_ample(sq.facet_count());
  for (std::size_t i = 0; i < sq_ample.size(); ++i) sq_ample[i] = num(sq.offsets[i]);
  cases.push_back({&sq, sq_ample});
  cases.push_back({&sq, IVec(4, 0)});
  cases.push_back({&sq, IVec{Int(0), Int(1), Int(0), Int(0)}});
  IVec hex_ample(hex.facet_count());
  for (std::size_t i = 0; i < hex_ample.size(); ++i) hex_ample[i] = num(hex.offsets[i]);
  cases.push_back({&hex, hex_ample});
  cases.push_back({&hex, IVec(6, 0)});
  for (const auto& [p, dprime] : cases) {
    FibrationData fd = fibration_multiplicities(*p, dprime);
    std::map<std::size_t, Int> alt;
    for (const auto& [key, count] : fd.d)
      alt[key.first] += (key.second % 2 == 0 ? count : -count);
    for (const auto& [face, sum] : alt) REQUIRE(sum == 1);
    REQUIRE(alt.size() == fd.p_dprime.faces.size());
  }
}
