#pragma once

#include <string>

#include "relarb/domain.hpp"
#include "relarb/kernels.hpp"

namespace relarb {

/// Regular grid covering the domain's bounding box. Nodes are classified by
/// closed-set membership in the domain; node coordinates are exactly
/// origin + index * delta.
struct Grid {
  Vec origin;
  double delta = 0.0;
  std::vector<int> dims;
  std::vector<int32_t> strides;  // row-major, last axis fastest
  std::vector<uint8_t> inside;   // closed membership per node
  std::vector<int32_t> interior; // linear indices of inside nodes
  int64_t node_count = 0;

  int n() const { return static_cast<int>(dims.size()); }
  kernels::GridDesc desc() const;
  Vec coords(int32_t linear) const;
  void decode(int32_t linear, int* idx) const;
  int32_t encode(const int* idx) const;
};

inline constexpr int64_t kNodeCap = 20'000'000;

/// Throws ValidationError when delta is degenerate (>= enclosing-ball
/// radius) and ResourceError past the node cap.
Grid build_grid(const Domain& dom, double delta);

/// Grid-sampled nonnegative value field, zero off the domain. `values` is
/// the clean field (0 at non-interior nodes); `sampling` mirrors it with
/// NaN at outside nodes and feeds the interpolation kernels.
struct ValueField {
  Grid grid;
  Vec values;
  Vec sampling;
  int64_t iterations = 0;
  double residual = 0.0;

  ValueField() = default;
  explicit ValueField(Grid g);

  void set_node_value(int32_t linear, double v);
  double node_value(int32_t linear) const { return values[linear]; }
};

/// Multilinear interpolation with the zero-boundary convention: 0 off the
/// domain, and 0 whenever a participating cell corner lies off the domain.
double sample_value(const ValueField& field, const Vec& x);

/// CSV with header "i1,...,in,x1,...,xn,v", nodes in linear order.
std::string value_field_csv(const ValueField& field);

}  // namespace relarb
