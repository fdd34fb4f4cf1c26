#include "atsmc/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "atsmc/errors.hpp"

namespace atsmc {

double CdfGrid::at_time(double t) const {
  if (values.empty()) return 0.0;
  if (!(t > 0.0)) return values.front();
  double pos = t / step;
  if (pos >= static_cast<double>(values.size() - 1)) return values.back();
  auto k = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(k);
  return values[k] + (values[k + 1] - values[k]) * frac;
}

namespace {

void check_compatible(const CdfGrid& a, const CdfGrid& b) {
  if (a.values.size() != b.values.size() || a.step != b.step)
    throw OracleError("convolve_cdfs: grids differ in step or length");
  if (a.values.size() < 2) throw OracleError("convolve_cdfs: grid too short");
}

// C[k] = sum_j (B[j+1] - B[j]) * (A[k-j] + A[k-j-1]) / 2.  Averaging adjacent
// A samples keeps C monotone whenever A and B are, which downstream dominance
// checks rely on.
template <bool Parallel>
CdfGrid convolve_impl(const CdfGrid& a, const CdfGrid& b) {
  check_compatible(a, b);
  const auto n = static_cast<std::int64_t>(a.values.size()) - 1;
  CdfGrid c;
  c.step = a.step;
  c.values.assign(a.values.size(), 0.0);
  const double* av = a.values.data();
  const double* bv = b.values.data();
  double* cv = c.values.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel)
#endif
  for (std::int64_t k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < k; ++j)
      acc += (bv[j + 1] - bv[j]) * (av[k - j] + av[k - j - 1]) * 0.5;
    cv[k] = acc;
  }
  return c;
}

}  // namespace

CdfGrid convolve_cdfs(const CdfGrid& a, const CdfGrid& b) {
  return convolve_impl<true>(a, b);
}

CdfGrid convolve_cdfs_serial(const CdfGrid& a, const CdfGrid& b) {
  return convolve_impl<false>(a, b);
}

namespace {

CdfGrid compute_cdf(const AttackTree& tree, const Node& node, std::size_t points,
                    double step);

CdfGrid leaf_grid(const Rate& rate, std::size_t points, double step) {
  CdfGrid g;
  g.step = step;
  g.values.resize(points);
  for (std::size_t k = 0; k < points; ++k)
    g.values[k] = -std::expm1(-rate.lambda * (static_cast<double>(k) * step));
  return g;
}

CdfGrid gate_grid(const AttackTree& tree, const Gate& gate, std::size_t points,
                  double step) {
  std::vector<CdfGrid> child;
  child.reserve(gate.children.size());
  for (const std::string& id : gate.children)
    child.push_back(compute_cdf(tree, *tree.find(id), points, step));

  CdfGrid g = std::move(child.front());
  switch (gate.kind) {
    case GateKind::Or:
      for (std::size_t i = 1; i < child.size(); ++i)
        for (std::size_t k = 0; k < points; ++k)
          g.values[k] = 1.0 - (1.0 - g.values[k]) * (1.0 - child[i].values[k]);
      break;
    case GateKind::And:
      for (std::size_t i = 1; i < child.size(); ++i)
        for (std::size_t k = 0; k < points; ++k)
          g.values[k] *= child[i].values[k];
      break;
    case GateKind::Sand:
      for (std::size_t i = 1; i < child.size(); ++i)
        g = convolve_cdfs(g, child[i]);
      break;
  }
  return g;
}

CdfGrid compute_cdf(const AttackTree& tree, const Node& node, std::size_t points,
                    double step) {
  if (const Gate* gate = node.gate()) return gate_grid(tree, *gate, points, step);
  return leaf_grid(node.leaf()->rate, points, step);
}

}  // namespace

CdfGrid node_cdf(const AttackTree& tree, std::string_view node_id, double horizon,
                 const OracleSettings& settings) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw OracleError("node_cdf: horizon must be positive and finite");
  if (!(settings.step > 0.0))
    throw OracleError("node_cdf: grid step must be positive");
  if (settings.step > horizon / 10.0)
    throw OracleError("node_cdf: grid step " + std::to_string(settings.step) +
                      " too coarse for horizon " + std::to_string(horizon));

  std::vector<Violation> violations = validate_tree(tree);
  if (!violations.empty())
    throw InvalidTreeError("node_cdf: invalid model: " + violations.front().message);
  if (tree.has_shared_nodes())
    throw OracleError(
        "node_cdf: the model shares a node between parents; the analytic "
        "oracle needs a proper tree");

  const Node* node = tree.find(node_id);
  if (!node)
    throw OracleError("node_cdf: unknown node '" + std::string(node_id) + "'");

  auto steps = static_cast<std::size_t>(std::ceil(horizon / settings.step - 1e-9));
  return compute_cdf(tree, *node, steps + 1, settings.step);
}

CdfGrid top_curve(const AttackTree& tree, double horizon,
                  const OracleSettings& settings) {
  return node_cdf(tree, tree.top_event, horizon, settings);
}

double top_probability(const AttackTree& tree, double time,
                       const OracleSettings& settings) {
  return top_curve(tree, time, settings).at_time(time);
}

}  // namespace atsmc
