#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/SparseCore>

namespace fracspec {

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
};

struct LdltStats {
  std::size_t two_by_two_pivots = 0;
  std::size_t delayed_pivots = 0;
  std::size_t max_front = 0;
  // Some pivot fell below the relative singularity tolerance.
  bool near_singular = false;
};

// Multifrontal LDLᵀ of a sparse symmetric (possibly indefinite) matrix that only
// tracks pivot signs. Pivots are 1×1 or 2×2 blocks chosen by a threshold test;
// columns failing it are delayed to the parent front, and root fronts fall back
// to Bunch–Kaufman, which always succeeds.
//
// Construction performs the symbolic phase (fill-reducing ordering, elimination
// tree, supernodes) and may be shared across threads; each `inertia` call owns
// its workspace.
class SparseLdlt {
 public:
  // `lower` holds the lower triangle (diagonal included) in column-major storage.
  explicit SparseLdlt(const Eigen::SparseMatrix<double>& lower);

  // `lower` must have exactly the pattern given to the constructor.
  Inertia inertia(const Eigen::SparseMatrix<double>& lower, LdltStats* stats = nullptr) const;

  std::size_t dimension() const { return n_; }
  std::size_t supernode_count() const { return sn_first_.size(); }
  std::size_t factor_nonzeros() const { return factor_nnz_; }

  static constexpr double kPivotThreshold = 0.1;
  static constexpr double kSingularTolerance = 1e-11;

 private:
  struct Assembly {
    std::size_t value_index;
    int row;  // local row; rows in the structure part are offset by the delayed count at run time
    int col;
    bool row_in_structure;
  };

  std::size_t n_ = 0;
  std::size_t nnz_ = 0;
  std::vector<int> pattern_outer_;
  std::vector<int> pattern_inner_;
  std::size_t factor_nnz_ = 0;

  std::vector<int> sn_first_;                  // first column of each supernode
  std::vector<int> sn_size_;                   // number of columns
  std::vector<std::vector<int>> sn_structure_; // rows below the supernode block
  std::vector<int> sn_children_;               // number of child supernodes
  std::vector<std::size_t> asm_ptr_;
  std::vector<Assembly> asm_;
};

}  // namespace fracspec
