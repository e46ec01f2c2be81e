#pragma once

#include <variant>

#include "relarb/symmat.hpp"

namespace relarb {

// Compact domain geometry: membership, faces, enclosing balls, and the
// isometric embedding of the probability simplex. All variants are convex
// (an H-representation cannot describe anything else).

struct Ball {
  Vec center;
  double radius = 0.0;
};

struct Box {
  Vec lo;
  Vec hi;
};

/// Half-space intersection n_i^T x <= b_i with unit normals. Construction
/// renormalizes rows, verifies boundedness/nonemptiness by vertex
/// enumeration, and caches the vertex bounding box.
struct Polytope {
  Mat normals;  // m x n, unit rows
  Vec offsets;  // m
  Vec box_lo, box_hi;

  Polytope() = default;
  Polytope(Mat normals_, Vec offsets_);
};

/// Isometric chart of the d-vertex probability simplex: columns of `basis`
/// are orthonormal and annihilate the all-ones vector.
struct SimplexMap {
  int d = 0;
  Mat basis;   // d x (d-1)
  Vec center;  // uniform weights
};

struct SimplexImage {
  int d = 0;
  SimplexMap embedding;
  Polytope polytope;
};

struct Domain {
  std::variant<Ball, Box, Polytope, SimplexImage> shape;

  int dim() const;
};

Domain make_ball(Vec center, double radius);
Domain make_box(Vec lo, Vec hi);
Domain make_polytope(Mat normals, Vec offsets);
Domain make_simplex_image(int d);

struct FaceInfo {
  std::vector<int> active;  // indices of tight constraints
  int dimension = 0;
  bool interior = false;
};

/// Closed-set membership with 1e-12 relative tolerance on constraint slack.
bool contains(const Domain& dom, const Vec& x);

/// Signed distance-like margin: smallest constraint slack (ball: r - |x-c|).
/// Negative outside. Used for exit-time crossing interpolation.
double boundary_slack(const Domain& dom, const Vec& x);

/// Face of the polyhedral domain whose relative interior contains x.
/// Unsupported for Ball (every boundary point is an extreme point).
FaceInfo face_of(const Domain& dom, const Vec& x, double tol = -1.0);

/// Whether the exit-time value function vanishes at x: true iff the face
/// containing x has dimension <= n - k.
bool zero_boundary_predicted(const Domain& dom, const Vec& x, const ProblemParams& params);

/// Axis-aligned bounding box of the domain.
void bounding_box(const Domain& dom, Vec& lo, Vec& hi);

/// A ball containing the domain: exact for Ball, the circumscribed ball of
/// the bounding box otherwise (valid, not minimal).
void enclosing_ball(const Domain& dom, Vec& center, double& radius);

/// Deterministic orthonormal basis of the simplex chart via the Householder
/// reflection carrying 1/sqrt(d) * ones to the last axis.
SimplexMap simplex_isometry(int d);

/// basis^T (mu - center); validates that mu lies on the simplex.
Vec map_point(const SimplexMap& map, const Vec& mu);

/// basis^T chat basis, the covariance seen by the embedded coordinates.
SymMatrix map_covariance(const SimplexMap& map, const SymMatrix& chat);

Domain domain_from_json(const std::string& text);
std::string domain_to_json(const Domain& dom);

}  // namespace relarb
