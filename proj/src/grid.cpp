#include "relarb/grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace relarb {

kernels::GridDesc Grid::desc() const {
  kernels::GridDesc d;
  d.n = n();
  d.inv_delta = 1.0 / delta;
  for (int i = 0; i < d.n; ++i) {
    d.origin[i] = origin[i];
    d.dims[i] = dims[i];
    d.strides[i] = strides[i];
  }
  return d;
}

Vec Grid::coords(int32_t linear) const {
  int idx[4];
  decode(linear, idx);
  Vec x(n());
  for (int d = 0; d < n(); ++d) x[d] = origin[d] + idx[d] * delta;
  return x;
}

void Grid::decode(int32_t linear, int* idx) const {
  for (int d = 0; d < n(); ++d) {
    idx[d] = linear / strides[d];
    linear -= idx[d] * strides[d];
  }
}

int32_t Grid::encode(const int* idx) const {
  int32_t linear = 0;
  for (int d = 0; d < n(); ++d) linear += idx[d] * strides[d];
  return linear;
}

Grid build_grid(const Domain& dom, double delta) {
  if (!(delta > 0.0)) throw ValidationError("build_grid: delta must be positive");
  Vec center;
  double radius = 0.0;
  enclosing_ball(dom, center, radius);
  if (!(delta < radius))
    throw ValidationError("build_grid: delta must be below the enclosing-ball radius");

  Grid g;
  g.delta = delta;
  Vec hi;
  bounding_box(dom, g.origin, hi);
  const int n = static_cast<int>(g.origin.size());
  if (n > 4) throw ResourceError("build_grid: full grids support at most 4 dimensions");

  g.dims.resize(n);
  int64_t count = 1;
  for (int d = 0; d < n; ++d) {
    const double span = hi[d] - g.origin[d];
    g.dims[d] = std::max(2, static_cast<int>(std::ceil(span / delta - 1e-9)) + 1);
    count *= g.dims[d];
    if (count > kNodeCap)
      throw ResourceError("build_grid: node count exceeds cap; use a coarser delta");
  }
  g.node_count = count;

  g.strides.assign(n, 1);
  for (int d = n - 2; d >= 0; --d) g.strides[d] = g.strides[d + 1] * g.dims[d + 1];

  g.inside.assign(count, 0);
  Vec x(n);
  int idx[4] = {0, 0, 0, 0};
  for (int32_t lin = 0; lin < count; ++lin) {
    for (int d = 0; d < n; ++d) x[d] = g.origin[d] + idx[d] * delta;
    if (contains(dom, x)) {
      g.inside[lin] = 1;
      g.interior.push_back(lin);
    }
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] < g.dims[d]) break;
      idx[d] = 0;
    }
  }
  return g;
}

ValueField::ValueField(Grid g) : grid(std::move(g)) {
  values.assign(grid.node_count, 0.0);
  sampling.assign(grid.node_count, std::numeric_limits<double>::quiet_NaN());
  for (int32_t lin : grid.interior) sampling[lin] = 0.0;
}

void ValueField::set_node_value(int32_t linear, double v) {
  values[linear] = v;
  if (grid.inside[linear]) sampling[linear] = v;
}

double sample_value(const ValueField& field, const Vec& x) {
  const kernels::GridDesc d = field.grid.desc();
  const double* xs[4];
  for (int i = 0; i < d.n; ++i) xs[i] = &x[i];
  double out = 0.0;
  kernels::interp_batch(d, field.sampling.data(), xs, &out, 1);
  return out;
}

std::string value_field_csv(const ValueField& field) {
  const Grid& g = field.grid;
  const int n = g.n();
  std::ostringstream os;
  os.precision(17);
  for (int d = 0; d < n; ++d) os << "i" << d + 1 << ",";
  for (int d = 0; d < n; ++d) os << "x" << d + 1 << ",";
  os << "v\n";
  int idx[4];
  for (int32_t lin = 0; lin < g.node_count; ++lin) {
    g.decode(lin, idx);
    for (int d = 0; d < n; ++d) os << idx[d] << ",";
    for (int d = 0; d < n; ++d) os << g.origin[d] + idx[d] * g.delta << ",";
    os << field.values[lin] << "\n";
  }
  return os.str();
}

}  // namespace relarb
