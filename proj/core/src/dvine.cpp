#include "stcop/dvine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stcop/numerics.hpp"

namespace stcop {

namespace {

void check_order(const std::vector<int>& order, Eigen::Index cols) {
  const int m = static_cast<int>(order.size());
  if (m < 2) throw std::invalid_argument("d-vine: need at least 2 variables");
  if (cols != m) {
    throw std::invalid_argument("d-vine: order length must match data columns");
  }
  std::vector<bool> seen(m, false);
  for (int c : order) {
    if (c < 0 || c >= m || seen[c]) {
      throw std::invalid_argument("d-vine: order is not a permutation");
    }
    seen[c] = true;
  }
}

void check_degenerate(const Eigen::VectorXd& col, int tree, int pos) {
  if (col.maxCoeff() - col.minCoeff() < 1e-10) {
    throw std::runtime_error(
        "fit_dvine: degenerate propagated pseudo-observations at tree " +
        std::to_string(tree) + ", edge " + std::to_string(pos));
  }
}

}  // namespace

DVineModel fit_dvine(const Eigen::MatrixXd& data, const std::vector<int>& order,
                     const std::vector<CopulaFamily>& candidates) {
  check_order(order, data.cols());
  const int m = static_cast<int>(order.size());
  const auto n = data.rows();
  if (n < 100) throw std::invalid_argument("fit_dvine: need at least 100 rows");

  DVineModel model;
  model.order = order;
  model.pairs.resize(m - 1);

  // bwd[i] = F(u_i | mid), fwd[i] = F(u_{i+tree} | mid) for the current tree,
  // columns over observations; tree 1 starts from the raw slots.
  std::vector<Eigen::VectorXd> bwd(m), fwd(m);
  for (int i = 0; i < m; ++i) {
    bwd[i] = data.col(order[i]);
    if (i > 0) fwd[i - 1] = data.col(order[i]);
  }
  double total_ll = 0.0;
  for (int tree = 1; tree <= m - 1; ++tree) {
    const int n_edges = m - tree;
    model.pairs[tree - 1].resize(n_edges);
    for (int i = 0; i < n_edges; ++i) {
      check_degenerate(bwd[i], tree, i + 1);
      check_degenerate(fwd[i], tree, i + 1);
      Eigen::MatrixX2d uv(n, 2);
      uv.col(0) = bwd[i];
      uv.col(1) = fwd[i];
      PairFitResult fit = select_pair_family(uv, candidates);
      model.pairs[tree - 1][i] = fit.copula;
      total_ll += fit.loglik;
    }
    if (tree == m - 1) break;
    // propagate: new bwd[i] = h(bwd|fwd) of edge i, new fwd[i] = h(fwd|bwd)
    // of edge i+1
    std::vector<Eigen::VectorXd> nbwd(m), nfwd(m);
    for (int i = 0; i < n_edges - 1; ++i) {
      const PairCopula& left = model.pairs[tree - 1][i];
      const PairCopula& right = model.pairs[tree - 1][i + 1];
      nbwd[i].resize(n);
      nfwd[i].resize(n);
      for (Eigen::Index r = 0; r < n; ++r) {
        nbwd[i](r) = clamp_unit(h_function(left, bwd[i](r), fwd[i](r)));
        nfwd[i](r) =
            clamp_unit(h_function(right, fwd[i + 1](r), bwd[i + 1](r)));
      }
    }
    bwd.swap(nbwd);
    fwd.swap(nfwd);
  }
  model.loglik = total_ll;
  return model;
}

double dvine_log_density(const DVineModel& model, const Eigen::VectorXd& u) {
  const int m = model.dim();
  if (u.size() != m) {
    throw std::invalid_argument("dvine_log_density: dimension mismatch");
  }
  for (int i = 0; i < m; ++i) {
    if (!(u(i) > 0.0 && u(i) < 1.0)) {
      throw std::domain_error(
          "dvine_log_density: coordinates must be strictly inside (0,1)");
    }
  }
  std::vector<double> bwd(m), fwd(m);
  for (int i = 0; i < m; ++i) {
    bwd[i] = u(i);
    if (i > 0) fwd[i - 1] = u(i);
  }
  double ll = 0.0;
  for (int tree = 1; tree <= m - 1; ++tree) {
    const int n_edges = m - tree;
    for (int i = 0; i < n_edges; ++i) {
      ll += pair_log_density(model.edge(tree, i + 1), bwd[i], fwd[i]);
    }
    if (tree == m - 1) break;
    std::vector<double> nbwd(m), nfwd(m);
    for (int i = 0; i < n_edges - 1; ++i) {
      nbwd[i] = clamp_unit(
          h_function(model.edge(tree, i + 1), bwd[i], fwd[i]));
      nfwd[i] = clamp_unit(
          h_function(model.edge(tree, i + 2), fwd[i + 1], bwd[i + 1]));
    }
    bwd.swap(nbwd);
    fwd.swap(nfwd);
  }
  return ll;
}

double dvine_density(const DVineModel& model, const Eigen::VectorXd& u) {
  return std::exp(dvine_log_density(model, u));
}

namespace {

// One cascade draw. b[j] tracks F(u_j | u_{j+1..i-1}) for the already placed
// slots j < i; for slot i the inverse cascade walks the conditioning chain
// from edge (i-1, 1) innermost to (1, i-1), and pinned slots recompute the
// same chain forward.
void cascade_one(const DVineModel& model, const Eigen::VectorXd& prefix,
                 RngStream& rng, Eigen::VectorXd& out) {
  const int m = model.dim();
  const int k = static_cast<int>(prefix.size());
  std::vector<double> b(m + 1), a(m + 1);
  out(0) = k >= 1 ? clamp_unit(prefix(0)) : rng.uniform();
  b[1] = out(0);
  for (int i = 2; i <= m; ++i) {
    if (i <= k) {
      double ui = clamp_unit(prefix(i - 1));
      out(i - 1) = ui;
      a[i - 1] = ui;
      for (int j = i - 2; j >= 1; --j) {
        a[j] = clamp_unit(
            h_function(model.edge(i - j - 1, j + 1), a[j + 1], b[j + 1]));
      }
    } else {
      double p = rng.uniform();
      for (int j = 1; j <= i - 1; ++j) {
        p = clamp_unit(h_inverse(model.edge(i - j, j), p, b[j]));
        a[j] = p;
      }
      out(i - 1) = p;
    }
    if (i == m) break;
    for (int j = 1; j <= i - 1; ++j) {
      b[j] = clamp_unit(h_function(model.edge(i - j, j), b[j], a[j]));
    }
    b[i] = out(i - 1);
  }
}

}  // namespace

Eigen::MatrixXd sample_dvine(const DVineModel& model, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_dvine: n must be >= 1");
  const int m = model.dim();
  Eigen::MatrixXd out(n, m);
  Eigen::VectorXd row(m);
  Eigen::VectorXd empty(0);
  for (int s = 0; s < n; ++s) {
    cascade_one(model, empty, rng, row);
    out.row(s) = row;
  }
  return out;
}

Eigen::MatrixXd conditional_sample_dvine(const DVineModel& model,
                                         const Eigen::VectorXd& prefix, int n,
                                         RngStream& rng) {
  const int m = model.dim();
  const int k = static_cast<int>(prefix.size());
  if (k < 1 || k >= m) {
    throw std::invalid_argument("conditional_sample_dvine: need 1 <= k < dim");
  }
  for (int i = 0; i < k; ++i) {
    if (!(prefix(i) > 0.0 && prefix(i) < 1.0)) {
      throw std::domain_error(
          "conditional_sample_dvine: prefix must be strictly inside (0,1)");
    }
  }
  if (n < 1) {
    throw std::invalid_argument("conditional_sample_dvine: n must be >= 1");
  }
  Eigen::MatrixXd out(n, m - k);
  Eigen::VectorXd row(m);
  for (int s = 0; s < n; ++s) {
    cascade_one(model, prefix, rng, row);
    out.row(s) = row.tail(m - k);
  }
  return out;
}

}  // namespace stcop
