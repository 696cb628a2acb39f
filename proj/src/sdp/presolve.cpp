#include "sdp/presolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace ddlqr::sdp::detail {
namespace {

struct UnionFind {
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
  std::vector<int> parent;
};

// Σ coef·row over block terms, merged per block.
DenseRow combine(const std::vector<DenseRow>& rows, const std::vector<std::pair<int, double>>& combo,
                 const std::vector<int>& dims) {
  std::map<int, Matrix> acc;
  double rhs = 0.0;
  for (const auto& [j, w] : combo) {
    const DenseRow& r = rows[static_cast<std::size_t>(j)];
    rhs += w * r.rhs;
    for (const BlockTerm& t : r.terms) {
      auto it = acc.find(t.block);
      if (it == acc.end()) it = acc.emplace(t.block, Matrix::Zero(dims[static_cast<std::size_t>(t.block)],
                                                                  dims[static_cast<std::size_t>(t.block)])).first;
      it->second += w * t.mat;
    }
  }
  DenseRow out;
  out.rhs = rhs;
  for (auto& [b, M] : acc)
    if (M.cwiseAbs().maxCoeff() > 0.0) out.terms.push_back({b, std::move(M)});
  return out;
}

// Greedy pivoted Cholesky of a PSD Gram matrix; returns the pivot order
// truncated at the numerical rank.
std::vector<int> independent_rows(const Matrix& gram, double rel_tol) {
  const Eigen::Index m = gram.rows();
  Matrix L = gram;
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  Vector d = L.diagonal();
  const double dmax = m > 0 ? d.maxCoeff() : 0.0;
  Matrix F = Matrix::Zero(m, m);
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::Index p = -1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!used[static_cast<std::size_t>(i)] && d(i) > best) best = d(i), p = i;
    if (p < 0 || best <= rel_tol * dmax) break;
    used[static_cast<std::size_t>(p)] = true;
    chosen.push_back(static_cast<int>(p));
    const double piv = std::sqrt(best);
    // Column k of the factor, over all rows.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)] && i != p) continue;
      double v = gram(i, p);
      for (Eigen::Index t = 0; t < k; ++t) v -= F(i, t) * F(p, t);
      F(i, k) = (i == p) ? piv : v / piv;
    }
    for (Eigen::Index i = 0; i < m; ++i)
      if (!used[static_cast<std::size_t>(i)]) d(i) -= F(i, k) * F(i, k);
  }
  return chosen;
}

}  // namespace

std::vector<DenseRow> dense_rows(const Problem& prob) {
  std::vector<DenseRow> out;
  out.reserve(prob.constraints.size());
  for (const Constraint& c : prob.constraints) {
    std::map<int, Matrix> acc;
    for (const Entry& e : c.entries) {
      const int d = prob.block_dims[static_cast<std::size_t>(e.block)];
      auto it = acc.find(e.block);
      if (it == acc.end()) it = acc.emplace(e.block, Matrix::Zero(d, d)).first;
      it->second(e.row, e.col) += e.value;
      if (e.row != e.col) it->second(e.col, e.row) += e.value;
    }
    DenseRow r;
    r.rhs = c.rhs;
    for (auto& [b, M] : acc) r.terms.push_back({b, std::move(M)});
    out.push_back(std::move(r));
  }
  return out;
}

Presolved presolve(const Problem& prob, double rank_tol) {
  prob.validate();
  Presolved pre;
  pre.dims = prob.block_dims;
  pre.C = prob.objective_blocks();
  pre.offset = prob.objective_offset;
  pre.num_free = prob.num_free;
  pre.original = dense_rows(prob);
  const int m = prob.num_constraints();
  pre.dual_shift = Vector::Zero(m);

  // Row equilibration.
  std::vector<DenseRow> scaled = pre.original;
  pre.row_scale.assign(static_cast<std::size_t>(m), 1.0);
  std::vector<bool> empty_row(static_cast<std::size_t>(m), false);
  const double bmax = std::accumulate(prob.constraints.begin(), prob.constraints.end(), 0.0,
                                      [](double a, const Constraint& c) { return std::max(a, std::abs(c.rhs)); });
  // Free variables are rescaled to unit coefficient columns first; data
  // matrices with exponentially growing columns need this for a clean rank
  // decision below.
  pre.col_scale.assign(static_cast<std::size_t>(prob.num_free), 1.0);
  {
    std::vector<double> col_sq(static_cast<std::size_t>(prob.num_free), 0.0);
    for (const Constraint& c : prob.constraints)
      for (const auto& [j, f] : c.free_terms) col_sq[static_cast<std::size_t>(j)] += f * f;
    for (int j = 0; j < prob.num_free; ++j)
      if (col_sq[static_cast<std::size_t>(j)] > 0.0)
        pre.col_scale[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(col_sq[static_cast<std::size_t>(j)]);
  }
  for (int i = 0; i < m; ++i) {
    double sq = 0.0;
    for (const BlockTerm& t : pre.original[static_cast<std::size_t>(i)].terms) sq += t.mat.squaredNorm();
    for (const auto& [j, f] : prob.constraints[static_cast<std::size_t>(i)].free_terms) {
      const double fs = f * pre.col_scale[static_cast<std::size_t>(j)];
      sq += fs * fs;
    }
    if (sq == 0.0) {
      empty_row[static_cast<std::size_t>(i)] = true;
      if (std::abs(prob.constraints[static_cast<std::size_t>(i)].rhs) > 1e-12 * (1.0 + bmax)) pre.inconsistent = true;
      pre.warnings.push_back("constraint " + std::to_string(i) + " has no terms; dropped");
      continue;
    }
    const double s = 1.0 / std::sqrt(sq);
    pre.row_scale[static_cast<std::size_t>(i)] = s;
    DenseRow& r = scaled[static_cast<std::size_t>(i)];
    r.rhs *= s;
    for (BlockTerm& t : r.terms) t.mat *= s;
  }

  // Free variables coupled through a common row form one group.
  const Vector c_free = prob.free_objective_vector();
  UnionFind uf(std::max(prob.num_free, 1));
  for (const Constraint& c : prob.constraints)
    for (std::size_t t = 1; t < c.free_terms.size(); ++t) uf.unite(c.free_terms[0].first, c.free_terms[t].first);
  std::map<int, FreeGroup> groups;
  std::vector<bool> var_seen(static_cast<std::size_t>(prob.num_free), false);
  std::vector<int> row_group(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const auto& ft = prob.constraints[static_cast<std::size_t>(i)].free_terms;
    if (ft.empty()) continue;
    const int root = uf.find(ft.front().first);
    row_group[static_cast<std::size_t>(i)] = root;
    FreeGroup& g = groups[root];
    g.rows.push_back(i);
    for (const auto& [j, f] : ft) {
      (void)f;
      if (!var_seen[static_cast<std::size_t>(j)]) {
        var_seen[static_cast<std::size_t>(j)] = true;
        g.vars.push_back(j);
      }
    }
  }
  for (int j = 0; j < prob.num_free; ++j) {
    if (!var_seen[static_cast<std::size_t>(j)] && c_free(j) != 0.0) pre.unbounded = true;
  }

  std::vector<std::vector<std::pair<int, double>>> combos;
  for (int i = 0; i < m; ++i) {
    if (row_group[static_cast<std::size_t>(i)] < 0 && !empty_row[static_cast<std::size_t>(i)])
      combos.push_back({{i, 1.0}});  // in scaled coordinates
  }

  for (auto& [root, g] : groups) {
    (void)root;
    std::sort(g.vars.begin(), g.vars.end());
    std::map<int, Eigen::Index> col_of;
    for (std::size_t t = 0; t < g.vars.size(); ++t) col_of[g.vars[t]] = static_cast<Eigen::Index>(t);
    const Eigen::Index r = static_cast<Eigen::Index>(g.rows.size());
    const Eigen::Index f = static_cast<Eigen::Index>(g.vars.size());
    Matrix F = Matrix::Zero(r, f);
    for (Eigen::Index a = 0; a < r; ++a) {
      const int i = g.rows[static_cast<std::size_t>(a)];
      for (const auto& [j, v] : prob.constraints[static_cast<std::size_t>(i)].free_terms)
        F(a, col_of[j]) += pre.row_scale[static_cast<std::size_t>(i)] * v * pre.col_scale[static_cast<std::size_t>(j)];
    }
    Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > rank_tol * smax) ++rank;
    const Matrix& U = svd.matrixU();
    const Matrix& V = svd.matrixV();
    const Matrix Ur = U.leftCols(rank);
    const Matrix Vr = V.leftCols(rank);
    const Vector inv_s = sv.head(rank).cwiseInverse();
    g.pinv = Vr * inv_s.asDiagonal() * Ur.transpose();

    Vector cg(f);
    for (Eigen::Index t = 0; t < f; ++t) {
      const int j = g.vars[static_cast<std::size_t>(t)];
      cg(t) = c_free(j) * pre.col_scale[static_cast<std::size_t>(j)];
    }
    if ((cg - Vr * (Vr.transpose() * cg)).norm() > 1e-9 * (1.0 + cg.norm())) pre.unbounded = true;
    // x_f = pinv (b̃ - Ãx) turns cᵀx_f into wᵀ(b̃ - Ãx) with w = pinvᵀ c.
    const Vector w = g.pinv.transpose() * cg;
    for (Eigen::Index a = 0; a < r; ++a) {
      const int i = g.rows[static_cast<std::size_t>(a)];
      if (w(a) == 0.0) continue;
      const DenseRow& row = scaled[static_cast<std::size_t>(i)];
      pre.offset += w(a) * row.rhs;
      for (const BlockTerm& t : row.terms) pre.C[static_cast<std::size_t>(t.block)] -= w(a) * t.mat;
      pre.dual_shift(i) = w(a) * pre.row_scale[static_cast<std::size_t>(i)];
    }
    // Left null space of F: combinations free of the group's variables.
    for (Eigen::Index t = rank; t < r; ++t) {
      std::vector<std::pair<int, double>> combo;
      for (Eigen::Index a = 0; a < r; ++a)
        if (U(a, t) != 0.0) combo.emplace_back(g.rows[static_cast<std::size_t>(a)], U(a, t));
      combos.push_back(std::move(combo));
    }
  }
  for (auto& [root, g] : groups) {
    (void)root;
    pre.groups.push_back(std::move(g));
  }

  std::vector<DenseRow> reduced;
  reduced.reserve(combos.size());
  for (const auto& combo : combos) reduced.push_back(combine(scaled, combo, pre.dims));

  // Drop rows that are numerically dependent on earlier pivots.
  std::vector<int> keep;
  {
    std::vector<DenseRow> nonzero;
    std::vector<int> nz_index;
    for (std::size_t k = 0; k < reduced.size(); ++k) {
      if (reduced[k].terms.empty()) {
        if (std::abs(reduced[k].rhs) > 1e-9 * (1.0 + bmax)) pre.inconsistent = true;
        pre.warnings.push_back("a constraint combination has no block terms; dropped");
        continue;
      }
      nz_index.push_back(static_cast<int>(k));
    }
    std::vector<DenseRow> candidate;
    for (int k : nz_index) candidate.push_back(reduced[static_cast<std::size_t>(k)]);
    const Operator op(pre.dims, candidate);
    const Matrix G = op.gram();
    std::vector<int> chosen = independent_rows(G, 1e-12);
    std::sort(chosen.begin(), chosen.end());
    if (chosen.size() < candidate.size()) {
      pre.warnings.push_back(std::to_string(candidate.size() - chosen.size()) + " dependent constraint rows dropped");
      // A dropped row must be implied by the kept ones, right-hand side included.
      const Eigen::Index kc = static_cast<Eigen::Index>(chosen.size());
      Matrix Gkk(kc, kc);
      Vector bk(kc);
      for (Eigen::Index a = 0; a < kc; ++a) {
        bk(a) = candidate[static_cast<std::size_t>(chosen[static_cast<std::size_t>(a)])].rhs;
        for (Eigen::Index b = 0; b < kc; ++b)
          Gkk(a, b) = G(chosen[static_cast<std::size_t>(a)], chosen[static_cast<std::size_t>(b)]);
      }
      Eigen::LDLT<Matrix> ldlt(Gkk);
      std::vector<bool> is_kept(candidate.size(), false);
      for (int c : chosen) is_kept[static_cast<std::size_t>(c)] = true;
      for (std::size_t d = 0; d < candidate.size(); ++d) {
        if (is_kept[d]) continue;
        Vector g(kc);
        for (Eigen::Index a = 0; a < kc; ++a) g(a) = G(chosen[static_cast<std::size_t>(a)], static_cast<Eigen::Index>(d));
        const Vector coef = kc ? Vector(ldlt.solve(g)) : Vector();
        const double implied = kc ? coef.dot(bk) : 0.0;
        if (std::abs(candidate[d].rhs - implied) > 1e-8 * (1.0 + bmax)) pre.inconsistent = true;
      }
    }
    for (int c : chosen) keep.push_back(nz_index[static_cast<std::size_t>(c)]);
  }

  for (int k : keep) {
    pre.rows.push_back(std::move(reduced[static_cast<std::size_t>(k)]));
    auto combo = combos[static_cast<std::size_t>(k)];
    for (auto& [j, w] : combo) w *= pre.row_scale[static_cast<std::size_t>(j)];
    pre.combos.push_back(std::move(combo));
  }
  return pre;
}

Vector lift_dual(const Presolved& pre, const Vector& y_reduced) {
  Vector y = pre.dual_shift;
  for (std::size_t k = 0; k < pre.combos.size(); ++k)
    for (const auto& [j, w] : pre.combos[k]) y(j) += w * y_reduced(static_cast<Eigen::Index>(k));
  return y;
}

Vector recover_free(const Problem& prob, const Presolved& pre, const std::vector<Matrix>& X) {
  Vector x = Vector::Zero(prob.num_free);
  for (const FreeGroup& g : pre.groups) {
    Vector r(static_cast<Eigen::Index>(g.rows.size()));
    for (std::size_t a = 0; a < g.rows.size(); ++a) {
      const int i = g.rows[a];
      const DenseRow& row = pre.original[static_cast<std::size_t>(i)];
      double ax = 0.0;
      for (const BlockTerm& t : row.terms) ax += t.mat.cwiseProduct(X[static_cast<std::size_t>(t.block)]).sum();
      r(static_cast<Eigen::Index>(a)) = pre.row_scale[static_cast<std::size_t>(i)] * (row.rhs - ax);
    }
    const Vector xg = g.pinv * r;
    for (std::size_t t = 0; t < g.vars.size(); ++t)
      x(g.vars[t]) = pre.col_scale[static_cast<std::size_t>(g.vars[t])] * xg(static_cast<Eigen::Index>(t));
  }
  return x;
}

}  // namespace ddlqr::sdp::detail
