#include "fracspec/sparse_ldlt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/OrderingMethods>

namespace fracspec {

namespace {

// Elimination tree of a symmetric matrix given, per row i, the columns k < i
// holding nonzeros (Liu's algorithm with path compression).
std::vector<int> elimination_tree(const std::vector<std::vector<int>>& row_cols) {
  const int n = static_cast<int>(row_cols.size());
  std::vector<int> parent(n, -1), ancestor(n, -1);
  for (int i = 0; i < n; ++i)
    for (int k : row_cols[i]) {
      int r = k;
      while (ancestor[r] != -1 && ancestor[r] != i) {
        int next = ancestor[r];
        ancestor[r] = i;
        r = next;
      }
      if (ancestor[r] == -1) {
        ancestor[r] = i;
        parent[r] = i;
      }
    }
  return parent;
}

std::vector<int> postorder(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<int> head(n, -1), next(n, -1), order;
  order.reserve(n);
  for (int j = n - 1; j >= 0; --j)
    if (parent[j] >= 0) {
      next[j] = head[parent[j]];
      head[parent[j]] = j;
    }
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    if (parent[root] >= 0) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      int top = stack.back();
      if (head[top] >= 0) {
        int child = head[top];
        head[top] = next[child];
        stack.push_back(child);
      } else {
        stack.pop_back();
        order.push_back(top);
      }
    }
  }
  return order;
}

// Lower-triangle storage of a dense symmetric front; only (i, j) with i >= j is touched.
struct Front {
  std::size_t f = 0;
  std::vector<double> a;
  void reset(std::size_t size) {
    f = size;
    a.assign(size * size, 0.0);
  }
  double& at(std::size_t i, std::size_t j) { return i >= j ? a[j * f + i] : a[i * f + j]; }
};

struct Contribution {
  std::vector<int> index;  // global indices; the first `delayed` are uneliminated fully-summed variables
  std::size_t delayed = 0;
  std::vector<double> lower;  // column-major m×m, lower triangle used
};

struct PivotTally {
  Inertia* inertia;
  LdltStats* stats;
  double tol;
  void add(double d) {
    if (std::abs(d) <= tol) stats->near_singular = true;
    if (d > 0)
      ++inertia->positive;
    else if (d < 0)
      ++inertia->negative;
    else
      ++inertia->zero;
  }
  void add_block(double a, double b, double c) {
    double mean = 0.5 * (a + c);
    double rad = std::hypot(0.5 * (a - c), b);
    add(mean + rad);
    add(mean - rad);
  }
};

}  // namespace

SparseLdlt::SparseLdlt(const Eigen::SparseMatrix<double>& lower) {
  if (lower.rows() != lower.cols()) throw std::invalid_argument("matrix is not square");
  n_ = static_cast<std::size_t>(lower.rows());
  Eigen::SparseMatrix<double> a = lower;
  a.makeCompressed();
  nnz_ = static_cast<std::size_t>(a.nonZeros());
  pattern_outer_.assign(a.outerIndexPtr(), a.outerIndexPtr() + n_ + 1);
  pattern_inner_.assign(a.innerIndexPtr(), a.innerIndexPtr() + nnz_);
  const int n = static_cast<int>(n_);
  for (int j = 0; j < n; ++j)
    for (int p = pattern_outer_[j]; p < pattern_outer_[j + 1]; ++p)
      if (pattern_inner_[p] < j) throw std::invalid_argument("matrix has entries above the diagonal");
  if (n == 0) return;

  // Fill-reducing ordering on the symmetrized pattern: amd.indices()[new] = old.
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> amd;
  {
    Eigen::SparseMatrix<double> full = a.selfadjointView<Eigen::Lower>();
    Eigen::AMDOrdering<int> ordering;
    ordering(full, amd);
  }
  std::vector<int> new_of_old(n);
  for (int k = 0; k < n; ++k) new_of_old[amd.indices()[k]] = k;

  auto permuted_rows = [&](const std::vector<int>& perm) {
    std::vector<std::vector<int>> row_cols(n);
    for (int j = 0; j < n; ++j)
      for (int p = pattern_outer_[j]; p < pattern_outer_[j + 1]; ++p) {
        int i = pattern_inner_[p];
        int a1 = perm[i], b1 = perm[j];
        if (a1 == b1) continue;
        row_cols[std::max(a1, b1)].push_back(std::min(a1, b1));
      }
    return row_cols;
  };

  // Postorder the elimination tree so supernodes are contiguous and children precede parents.
  std::vector<int> parent = elimination_tree(permuted_rows(new_of_old));
  std::vector<int> post = postorder(parent);
  std::vector<int> relabel(n);
  for (int k = 0; k < n; ++k) relabel[post[k]] = k;
  for (int& v : new_of_old) v = relabel[v];
  {
    std::vector<int> p2(n, -1);
    for (int j = 0; j < n; ++j)
      if (parent[j] >= 0) p2[relabel[j]] = relabel[parent[j]];
    parent = std::move(p2);
  }

  // Column structures of L in the final ordering.
  std::vector<std::vector<int>> col_rows(n);
  for (int j = 0; j < n; ++j)
    for (int p = pattern_outer_[j]; p < pattern_outer_[j + 1]; ++p) {
      int a1 = new_of_old[pattern_inner_[p]], b1 = new_of_old[j];
      if (a1 != b1) col_rows[std::min(a1, b1)].push_back(std::max(a1, b1));
    }
  std::vector<std::vector<int>> structure(n);
  std::vector<int> child_count(n, 0);
  for (int j = 0; j < n; ++j)
    if (parent[j] >= 0) ++child_count[parent[j]];
  std::vector<int> merged;
  for (int j = 0; j < n; ++j) {
    auto& s = col_rows[j];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    structure[j] = std::move(s);
  }
  for (int j = 0; j < n; ++j) {
    // structure[j] is complete once all children have been merged (children have smaller labels).
    int pj = parent[j];
    if (pj < 0) continue;
    auto& ps = structure[pj];
    merged.clear();
    std::set_union(ps.begin(), ps.end(), structure[j].begin(), structure[j].end(), std::back_inserter(merged));
    merged.erase(std::remove(merged.begin(), merged.end(), pj), merged.end());
    ps.swap(merged);
  }
  for (int j = 0; j < n; ++j) factor_nnz_ += structure[j].size() + 1;

  // Fundamental supernodes.
  std::vector<int> sn_of(n);
  for (int j = 0; j < n; ++j) {
    bool extend = j > 0 && parent[j - 1] == j && child_count[j] == 1 &&
                  structure[j - 1].size() == structure[j].size() + 1;
    if (!extend) {
      sn_first_.push_back(j);
      sn_size_.push_back(0);
    }
    ++sn_size_.back();
    sn_of[j] = static_cast<int>(sn_first_.size()) - 1;
  }
  const std::size_t ns = sn_first_.size();
  sn_structure_.resize(ns);
  sn_children_.assign(ns, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    int last = sn_first_[s] + sn_size_[s] - 1;
    sn_structure_[s] = structure[last];
    if (parent[last] >= 0) ++sn_children_[sn_of[parent[last]]];
  }

  // Where every stored value lands in its front.
  std::vector<std::vector<Assembly>> per(ns);
  for (int j = 0; j < n; ++j)
    for (int p = pattern_outer_[j]; p < pattern_outer_[j + 1]; ++p) {
      int a1 = new_of_old[pattern_inner_[p]], b1 = new_of_old[j];
      int row = std::max(a1, b1), col = std::min(a1, b1);
      int s = sn_of[col];
      Assembly e{static_cast<std::size_t>(p), 0, col - sn_first_[s], false};
      if (row < sn_first_[s] + sn_size_[s]) {
        e.row = row - sn_first_[s];
      } else {
        const auto& st = sn_structure_[s];
        auto it = std::lower_bound(st.begin(), st.end(), row);
        e.row = sn_size_[s] + static_cast<int>(it - st.begin());
        e.row_in_structure = true;
      }
      per[s].push_back(e);
    }
  asm_ptr_.assign(ns + 1, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    asm_ptr_[s + 1] = asm_ptr_[s] + per[s].size();
    asm_.insert(asm_.end(), per[s].begin(), per[s].end());
  }
}

Inertia SparseLdlt::inertia(const Eigen::SparseMatrix<double>& lower, LdltStats* stats_out) const {
  if (static_cast<std::size_t>(lower.rows()) != n_ || static_cast<std::size_t>(lower.nonZeros()) != nnz_ ||
      !lower.isCompressed())
    throw std::invalid_argument("numeric matrix does not match the analysed pattern");
  const int n = static_cast<int>(n_);
  for (int j = 0; j <= n; ++j)
    if (lower.outerIndexPtr()[j] != pattern_outer_[j]) throw std::invalid_argument("pattern mismatch");
  for (std::size_t p = 0; p < nnz_; ++p)
    if (lower.innerIndexPtr()[p] != pattern_inner_[p]) throw std::invalid_argument("pattern mismatch");

  // Symmetric scaling by inverse square roots of row maxima (inertia is unchanged).
  std::vector<double> rowmax(n_, 0.0);
  const double* val = lower.valuePtr();
  for (int j = 0; j < n; ++j)
    for (int p = pattern_outer_[j]; p < pattern_outer_[j + 1]; ++p) {
      double v = std::abs(val[p]);
      int i = pattern_inner_[p];
      rowmax[i] = std::max(rowmax[i], v);
      rowmax[j] = std::max(rowmax[j], v);
    }
  std::vector<double> scale(n_);
  for (std::size_t i = 0; i < n_; ++i) scale[i] = rowmax[i] > 0 ? 1.0 / std::sqrt(rowmax[i]) : 1.0;
  std::vector<double> scaled(nnz_);
  for (int j = 0; j < n; ++j)
    for (int p = pattern_outer_[j]; p < pattern_outer_[j + 1]; ++p)
      scaled[p] = val[p] * scale[pattern_inner_[p]] * scale[j];

  Inertia result;
  LdltStats local_stats;
  LdltStats& stats = stats_out ? *stats_out : local_stats;
  stats = LdltStats{};
  PivotTally tally{&result, &stats, kSingularTolerance};

  std::vector<Contribution> stack;
  std::vector<int> position(n_, -1);
  Front front;
  std::vector<std::size_t> rem;
  std::vector<double> w1, w2;
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;

  for (std::size_t s = 0; s < sn_first_.size(); ++s) {
    const int first = sn_first_[s];
    const int ncols = sn_size_[s];
    const auto& st = sn_structure_[s];
    const bool root = st.empty();

    // Gather children (most recent entries on the stack).
    const std::size_t nchild = static_cast<std::size_t>(sn_children_[s]);
    std::vector<Contribution> children(std::make_move_iterator(stack.end() - static_cast<long>(nchild)),
                                       std::make_move_iterator(stack.end()));
    stack.resize(stack.size() - nchild);

    std::vector<int> index;
    for (int c = 0; c < ncols; ++c) index.push_back(first + c);
    for (const auto& ch : children)
      for (std::size_t k = 0; k < ch.delayed; ++k) index.push_back(ch.index[k]);
    const std::size_t nfully = index.size();
    const std::size_t nd = nfully - static_cast<std::size_t>(ncols);
    index.insert(index.end(), st.begin(), st.end());
    const std::size_t f = index.size();
    stats.max_front = std::max(stats.max_front, f);
    for (std::size_t k = 0; k < f; ++k) position[index[k]] = static_cast<int>(k);

    front.reset(f);
    for (std::size_t e = asm_ptr_[s]; e < asm_ptr_[s + 1]; ++e) {
      const Assembly& a = asm_[e];
      std::size_t r = static_cast<std::size_t>(a.row) + (a.row_in_structure ? nd : 0);
      front.at(r, static_cast<std::size_t>(a.col)) += scaled[a.value_index];
    }
    for (const auto& ch : children) {
      const std::size_t m = ch.index.size();
      std::vector<std::size_t> loc(m);
      for (std::size_t k = 0; k < m; ++k) {
        int p = position[ch.index[k]];
        if (p < 0) throw std::logic_error("contribution index outside parent front");
        loc[k] = static_cast<std::size_t>(p);
      }
      for (std::size_t jj = 0; jj < m; ++jj)
        for (std::size_t ii = jj; ii < m; ++ii) front.at(loc[ii], loc[jj]) += ch.lower[jj * m + ii];
    }
    children.clear();

    rem.resize(f);
    std::iota(rem.begin(), rem.end(), std::size_t{0});
    auto erase_pos = [&](std::size_t p) { rem.erase(std::lower_bound(rem.begin(), rem.end(), p)); };
    auto colmax = [&](std::size_t p, std::size_t skip, std::size_t* arg, bool fully_only) {
      double best = 0;
      for (std::size_t i : rem) {
        if (i == p || i == skip) continue;
        if (fully_only && i >= nfully) break;
        double v = std::abs(front.at(i, p));
        if (v > best) {
          best = v;
          if (arg) *arg = i;
        }
      }
      return best;
    };
    auto eliminate_1x1 = [&](std::size_t p) {
      double d = front.at(p, p);
      tally.add(d);
      erase_pos(p);
      if (d == 0.0) return;
      const std::size_t r = rem.size();
      w1.resize(r);
      for (std::size_t k = 0; k < r; ++k) w1[k] = front.at(rem[k], p);
      for (std::size_t jj = 0; jj < r; ++jj) {
        double lj = w1[jj] / d;
        if (lj == 0.0) continue;
        double* col = &front.a[rem[jj] * f];
        for (std::size_t ii = jj; ii < r; ++ii) col[rem[ii]] -= w1[ii] * lj;
      }
    };
    auto eliminate_2x2 = [&](std::size_t p, std::size_t q) {
      double a = front.at(p, p), b = front.at(q, p), c = front.at(q, q);
      double det = a * c - b * b;
      tally.add_block(a, b, c);
      ++stats.two_by_two_pivots;
      erase_pos(p);
      erase_pos(q);
      const std::size_t r = rem.size();
      w1.resize(r);
      w2.resize(r);
      for (std::size_t k = 0; k < r; ++k) {
        w1[k] = front.at(rem[k], p);
        w2[k] = front.at(rem[k], q);
      }
      for (std::size_t jj = 0; jj < r; ++jj) {
        double y1 = (c * w1[jj] - b * w2[jj]) / det;
        double y2 = (a * w2[jj] - b * w1[jj]) / det;
        double* col = &front.a[rem[jj] * f];
        for (std::size_t ii = jj; ii < r; ++ii) col[rem[ii]] -= w1[ii] * y1 + w2[ii] * y2;
      }
    };

    if (root) {
      // Every remaining variable is fully summed: plain Bunch–Kaufman.
      while (!rem.empty()) {
        std::size_t p = rem.front(), r = p;
        double app = std::abs(front.at(p, p));
        double w = colmax(p, p, &r, false);
        if (w == 0.0 || app >= alpha * w) {
          eliminate_1x1(p);
          continue;
        }
        double wr = colmax(r, r, nullptr, false);
        if (app * wr >= alpha * w * w)
          eliminate_1x1(p);
        else if (std::abs(front.at(r, r)) >= alpha * wr)
          eliminate_1x1(r);
        else
          eliminate_2x2(p, r);
      }
    } else {
      const double u = kPivotThreshold;
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t k = 0; k < rem.size() && rem[k] < nfully; ++k) {
          std::size_t p = rem[k];
          double app = std::abs(front.at(p, p));
          double gp = colmax(p, p, nullptr, false);
          if (gp == 0.0 || app >= u * gp) {
            eliminate_1x1(p);
            progress = true;
            break;
          }
          std::size_t q = p;
          if (colmax(p, p, &q, true) == 0.0 || q == p) continue;
          double a = front.at(p, p), b = front.at(q, p), c = front.at(q, q);
          double det = a * c - b * b;
          if (det == 0.0) continue;
          double cp = colmax(p, q, nullptr, false), cq = colmax(q, p, nullptr, false);
          bool ok = (std::abs(c) * cp + std::abs(b) * cq) <= std::abs(det) / u &&
                    (std::abs(b) * cp + std::abs(a) * cq) <= std::abs(det) / u;
          if (ok) {
            eliminate_2x2(p, q);
            progress = true;
            break;
          }
        }
      }
      Contribution out;
      for (std::size_t p : rem) {
        out.index.push_back(index[p]);
        if (p < nfully) ++out.delayed;
      }
      stats.delayed_pivots += out.delayed;
      const std::size_t m = rem.size();
      out.lower.assign(m * m, 0.0);
      for (std::size_t jj = 0; jj < m; ++jj)
        for (std::size_t ii = jj; ii < m; ++ii) out.lower[jj * m + ii] = front.at(rem[ii], rem[jj]);
      stack.push_back(std::move(out));
    }
    for (int idx : index) position[idx] = -1;
  }
  if (!stack.empty()) throw std::logic_error("unconsumed contribution blocks");
  return result;
}

}  // namespace fracspec
