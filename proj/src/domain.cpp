#include "relarb/domain.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace relarb {

namespace {

constexpr double kSlackTol = 1e-12;

// Gaussian elimination with partial pivoting; false if near-singular.
bool solve_linear(Mat a, Vec b, Vec& x) {
  const int n = a.rows;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-12) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
    x[r] = s / a(r, r);
  }
  return true;
}

// Enumerate vertices of {x : rows x <= offs} by solving all n-subsets of
// tight constraints and keeping the feasible solutions.
std::vector<Vec> enumerate_vertices(const Mat& rows, const Vec& offs) {
  const int m = rows.rows;
  const int n = rows.cols;
  if (n > m) return {};

  double combos = 1.0;
  for (int i = 0; i < n; ++i) combos *= static_cast<double>(m - i) / (i + 1);
  if (combos > 2e6)
    throw ResourceError("polytope: too many constraint subsets to enumerate; reduce row count");

  const double feas_tol = 1e-9 * (1.0 + norm_inf(offs));
  std::vector<Vec> verts;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;

  while (true) {
    Mat sub(n, n);
    Vec rhs(n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) sub(r, c) = rows(idx[r], c);
      rhs[r] = offs[idx[r]];
    }
    Vec x;
    if (solve_linear(sub, rhs, x)) {
      bool feasible = true;
      for (int r = 0; r < m && feasible; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += rows(r, c) * x[c];
        if (s > offs[r] + feas_tol) feasible = false;
      }
      if (feasible) verts.push_back(x);
    }

    // next combination
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == m - n + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int p = pos + 1; p < n; ++p) idx[p] = idx[p - 1] + 1;
  }
  return verts;
}

const Polytope& as_rows(const Domain& dom, Polytope& scratch) {
  if (const auto* p = std::get_if<Polytope>(&dom.shape)) return *p;
  if (const auto* s = std::get_if<SimplexImage>(&dom.shape)) return s->polytope;
  if (const auto* b = std::get_if<Box>(&dom.shape)) {
    const int n = static_cast<int>(b->lo.size());
    Mat rows(2 * n, n);
    Vec offs(2 * n);
    for (int j = 0; j < n; ++j) {
      rows(2 * j, j) = 1.0;
      offs[2 * j] = b->hi[j];
      rows(2 * j + 1, j) = -1.0;
      offs[2 * j + 1] = -b->lo[j];
    }
    scratch = Polytope(std::move(rows), std::move(offs));
    return scratch;
  }
  throw ValidationError("face_of: unsupported for ball domains");
}

}  // namespace

Polytope::Polytope(Mat normals_, Vec offsets_) : normals(std::move(normals_)), offsets(std::move(offsets_)) {
  const int m = normals.rows;
  const int n = normals.cols;
  if (m < 1 || n < 1 || static_cast<int>(offsets.size()) != m)
    throw ValidationError("polytope: inconsistent row data");

  for (int r = 0; r < m; ++r) {
    double nrm = 0.0;
    for (int c = 0; c < n; ++c) nrm += normals(r, c) * normals(r, c);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw ValidationError("polytope: zero normal row");
    for (int c = 0; c < n; ++c) normals(r, c) /= nrm;
    offsets[r] /= nrm;
  }

  // Boundedness: the recession cone {Nd <= 0} meets the unit box only at 0.
  Mat rec_rows(m + 2 * n, n);
  Vec rec_offs(m + 2 * n, 0.0);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) rec_rows(r, c) = normals(r, c);
  for (int j = 0; j < n; ++j) {
    rec_rows(m + 2 * j, j) = 1.0;
    rec_offs[m + 2 * j] = 1.0;
    rec_rows(m + 2 * j + 1, j) = -1.0;
    rec_offs[m + 2 * j + 1] = 1.0;
  }
  for (const Vec& d : enumerate_vertices(rec_rows, rec_offs))
    if (norm_inf(d) > 1e-6) throw ValidationError("polytope: feasible set is unbounded");

  const std::vector<Vec> verts = enumerate_vertices(normals, offsets);
  if (verts.empty()) throw ValidationError("polytope: feasible set is empty or degenerate");
  box_lo.assign(n, std::numeric_limits<double>::infinity());
  box_hi.assign(n, -std::numeric_limits<double>::infinity());
  for (const Vec& v : verts)
    for (int j = 0; j < n; ++j) {
      box_lo[j] = std::min(box_lo[j], v[j]);
      box_hi[j] = std::max(box_hi[j], v[j]);
    }
}

int Domain::dim() const {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(s.center.size());
        if constexpr (std::is_same_v<T, Box>) return static_cast<int>(s.lo.size());
        if constexpr (std::is_same_v<T, Polytope>) return s.normals.cols;
        if constexpr (std::is_same_v<T, SimplexImage>) return s.d - 1;
      },
      shape);
}

Domain make_ball(Vec center, double radius) {
  if (radius <= 0.0) throw ValidationError("ball: radius must be positive");
  return Domain{Ball{std::move(center), radius}};
}

Domain make_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.empty()) throw ValidationError("box: lo/hi size mismatch");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw ValidationError("box: lo must be strictly below hi");
  return Domain{Box{std::move(lo), std::move(hi)}};
}

Domain make_polytope(Mat normals, Vec offsets) {
  return Domain{Polytope(std::move(normals), std::move(offsets))};
}

Domain make_simplex_image(int d) {
  if (d < 3) throw ValidationError("simplex image: d must be >= 3");
  SimplexImage img;
  img.d = d;
  img.embedding = simplex_isometry(d);

  // Facets are the images of {mu_i >= 0}: with B the chart basis,
  // -(B^T e_i)^T x <= 1/d, and |B^T e_i| = sqrt(1 - 1/d).
  const int n = d - 1;
  const double row_norm = std::sqrt(1.0 - 1.0 / d);
  Mat rows(d, n);
  Vec offs(d, (1.0 / d) / row_norm);
  for (int i = 0; i < d; ++i)
    for (int c = 0; c < n; ++c) rows(i, c) = -img.embedding.basis(i, c) / row_norm;
  img.polytope = Polytope(std::move(rows), std::move(offs));
  return Domain{std::move(img)};
}

bool contains(const Domain& dom, const Vec& x) {
  if (static_cast<int>(x.size()) != dom.dim()) throw ValidationError("contains: dimension mismatch");
  return boundary_slack(dom, x) >= -kSlackTol * (1.0 + norm_inf(x));
}

double boundary_slack(const Domain& dom, const Vec& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          double d2 = 0.0;
          for (size_t i = 0; i < x.size(); ++i) {
            const double di = x[i] - s.center[i];
            d2 += di * di;
          }
          return s.radius - std::sqrt(d2);
        } else if constexpr (std::is_same_v<T, Box>) {
          double slack = std::numeric_limits<double>::infinity();
          for (size_t i = 0; i < x.size(); ++i)
            slack = std::min({slack, s.hi[i] - x[i], x[i] - s.lo[i]});
          return slack;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          double slack = std::numeric_limits<double>::infinity();
          for (int r = 0; r < s.normals.rows; ++r) {
            double v = s.offsets[r];
            for (int c = 0; c < s.normals.cols; ++c) v -= s.normals(r, c) * x[c];
            slack = std::min(slack, v);
          }
          return slack;
        } else {
          return boundary_slack(Domain{s.polytope}, x);
        }
      },
      dom.shape);
}

FaceInfo face_of(const Domain& dom, const Vec& x, double tol) {
  if (!contains(dom, x)) throw ValidationError("face_of: point lies outside the domain");
  Polytope scratch;
  const Polytope& poly = as_rows(dom, scratch);
  if (tol < 0.0) tol = 1e-9 * (1.0 + norm_inf(poly.offsets));

  FaceInfo info;
  const int n = poly.normals.cols;
  for (int r = 0; r < poly.normals.rows; ++r) {
    double slack = poly.offsets[r];
    for (int c = 0; c < n; ++c) slack -= poly.normals(r, c) * x[c];
    if (slack <= tol) info.active.push_back(r);
  }
  info.interior = info.active.empty();
  if (info.interior) {
    info.dimension = n;
    return info;
  }

  // rank of the active normal matrix by Gram-Schmidt on the unit rows,
  // residual threshold 1e-10 relative
  std::vector<Vec> basis;
  for (int r : info.active) {
    Vec v(n);
    for (int c = 0; c < n; ++c) v[c] = poly.normals(r, c);
    for (const Vec& b : basis) {
      const double proj = dot(v, b);
      for (int c = 0; c < n; ++c) v[c] -= proj * b[c];
    }
    const double res = norm2(v);
    if (res > 1e-10) {
      for (int c = 0; c < n; ++c) v[c] /= res;
      basis.push_back(std::move(v));
    }
  }
  info.dimension = n - static_cast<int>(basis.size());
  return info;
}

bool zero_boundary_predicted(const Domain& dom, const Vec& x, const ProblemParams& params) {
  return face_of(dom, x).dimension <= params.n - params.k;
}

void bounding_box(const Domain& dom, Vec& lo, Vec& hi) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          lo = s.center;
          hi = s.center;
          for (size_t i = 0; i < lo.size(); ++i) {
            lo[i] -= s.radius;
            hi[i] += s.radius;
          }
        } else if constexpr (std::is_same_v<T, Box>) {
          lo = s.lo;
          hi = s.hi;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          lo = s.box_lo;
          hi = s.box_hi;
        } else {
          lo = s.polytope.box_lo;
          hi = s.polytope.box_hi;
        }
      },
      dom.shape);
}

void enclosing_ball(const Domain& dom, Vec& center, double& radius) {
  if (const auto* b = std::get_if<Ball>(&dom.shape)) {
    center = b->center;
    radius = b->radius;
    return;
  }
  Vec lo, hi;
  bounding_box(dom, lo, hi);
  center.resize(lo.size());
  double r2 = 0.0;
  for (size_t i = 0; i < lo.size(); ++i) {
    center[i] = 0.5 * (lo[i] + hi[i]);
    const double h = 0.5 * (hi[i] - lo[i]);
    r2 += h * h;
  }
  radius = std::sqrt(r2);
}

SimplexMap simplex_isometry(int d) {
  if (d < 2) throw ValidationError("simplex_isometry: d must be >= 2");
  SimplexMap map;
  map.d = d;
  map.center.assign(d, 1.0 / d);
  map.basis = Mat(d, d - 1);

  // Householder reflection sending ones/sqrt(d) to -e_d; keep columns 0..d-2.
  const double u = 1.0 / std::sqrt(static_cast<double>(d));
  const double beta = 1.0 / (1.0 + u);
  for (int i = 0; i < d; ++i) {
    const double wi = (i == d - 1) ? u + 1.0 : u;
    for (int c = 0; c < d - 1; ++c) map.basis(i, c) = (i == c ? 1.0 : 0.0) - beta * wi * u;
  }
  return map;
}

Vec map_point(const SimplexMap& map, const Vec& mu) {
  if (static_cast<int>(mu.size()) != map.d) throw ValidationError("map_point: dimension mismatch");
  double sum = 0.0;
  std::ostringstream bad;
  for (int i = 0; i < map.d; ++i) {
    if (mu[i] < -1e-8) bad << " mu[" << i << "]=" << mu[i];
    sum += mu[i];
  }
  if (std::abs(sum - 1.0) > 1e-8) bad << " sum=" << sum;
  if (!bad.str().empty())
    throw ValidationError("map_point: not a simplex point:" + bad.str());

  Vec shifted(map.d);
  for (int i = 0; i < map.d; ++i) shifted[i] = mu[i] - map.center[i];
  return mat_tvec(map.basis, shifted);
}

SymMatrix map_covariance(const SimplexMap& map, const SymMatrix& chat) {
  if (chat.dim != map.d) throw ValidationError("map_covariance: dimension mismatch");
  return sym_conjugate(chat, map.basis);
}

Domain domain_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const std::string type = j.at("type").get<std::string>();
  if (type == "ball") return make_ball(j.at("center").get<Vec>(), j.at("radius").get<double>());
  if (type == "box") return make_box(j.at("lo").get<Vec>(), j.at("hi").get<Vec>());
  if (type == "polytope") {
    const auto rows = j.at("normals").get<std::vector<Vec>>();
    const Vec offs = j.at("offsets").get<Vec>();
    if (rows.empty()) throw ValidationError("polytope json: empty normals");
    Mat normals(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) throw ValidationError("polytope json: ragged normals");
      for (size_t c = 0; c < rows[r].size(); ++c) normals(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
    return make_polytope(std::move(normals), offs);
  }
  if (type == "simplex") return make_simplex_image(j.at("d").get<int>());
  throw ValidationError("domain json: unknown type '" + type + "'");
}

std::string domain_to_json(const Domain& dom) {
  nlohmann::json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          j["type"] = "ball";
          j["center"] = s.center;
          j["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          j["type"] = "box";
          j["lo"] = s.lo;
          j["hi"] = s.hi;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          j["type"] = "polytope";
          std::vector<Vec> rows;
          for (int r = 0; r < s.normals.rows; ++r) {
            Vec row(s.normals.cols);
            for (int c = 0; c < s.normals.cols; ++c) row[c] = s.normals(r, c);
            rows.push_back(std::move(row));
          }
          j["normals"] = rows;
          j["offsets"] = s.offsets;
        } else {
          j["type"] = "simplex";
          j["d"] = s.d;
        }
      },
      dom.shape);
  return j.dump();
}

}  // namespace relarb
