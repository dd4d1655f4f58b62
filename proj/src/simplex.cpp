#include "lethargy/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lethargy {

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class TableauSolver {
 public:
  TableauSolver(const Matrix& A, const Vector& b, const LpOptions& options)
      : options_(options), m_(A.rows()), n_(A.cols()) {
    for (Index i = 0; i < m_; ++i) {
      if (b(i) < 0.0) ++artificials_;
    }
    total_ = n_ + m_ + artificials_;
    original_ = Matrix::Zero(m_, total_);
    rhs_ = Vector::Zero(m_);
    basis_.resize(static_cast<std::size_t>(m_));
    Index next_artificial = n_ + m_;
    for (Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      original_.row(i).head(n_) = sign * A.row(i);
      original_(i, n_ + i) = sign;
      rhs_(i) = sign * b(i);
      if (b(i) < 0.0) {
        original_(i, next_artificial) = 1.0;
        basis_[static_cast<std::size_t>(i)] = next_artificial++;
      } else {
        basis_[static_cast<std::size_t>(i)] = n_ + i;
      }
    }
    tableau_ = Tableau::Zero(m_ + 1, total_ + 1);
    tableau_.topLeftCorner(m_, total_) = original_;
    tableau_.topRightCorner(m_, 1) = rhs_;
  }

  LpResult solve(const Vector& c) {
    LpResult result;
    if (artificials_ > 0) {
      Vector phase_one = Vector::Zero(total_);
      phase_one.tail(artificials_).setConstant(-1.0);
      set_objective(phase_one);
      const LpStatus status = iterate(total_);
      result.pivots = pivots_;
      if (status == LpStatus::IterationLimit) {
        result.status = status;
        return result;
      }
      const double scale = std::max(1.0, rhs_.cwiseAbs().maxCoeff());
      if (tableau_(m_, total_) < -1e-9 * scale) {
        result.status = LpStatus::Infeasible;
        return result;
      }
      drive_out_artificials();
    }
    Vector cost = Vector::Zero(total_);
    cost.head(n_) = c;
    set_objective(cost);
    result.status = iterate(n_ + m_);
    result.pivots = pivots_;
    if (result.status != LpStatus::Optimal) return result;
    result.x = refined_solution();
    result.objective = c.dot(result.x);
    return result;
  }

 private:
  // Objective row holds reduced costs c_B B^{-1} a_j - c_j; optimal when none
  // is negative.
  void set_objective(const Vector& cost) {
    cost_ = cost;
    tableau_.row(m_).setZero();
    tableau_.row(m_).head(total_) = -cost.transpose();
    for (Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) tableau_.row(m_) += cb * tableau_.row(i);
    }
  }

  void pivot(Index row, Index col) {
    tableau_.row(row) /= tableau_(row, col);
    tableau_(row, col) = 1.0;
    for (Index i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double factor = tableau_(i, col);
      if (factor == 0.0) continue;
      tableau_.row(i) -= factor * tableau_.row(row);
      tableau_(i, col) = 0.0;
      if (i < m_ && tableau_(i, total_) < 0.0 && tableau_(i, total_) > -options_.tolerance) {
        tableau_(i, total_) = 0.0;
      }
    }
    basis_[static_cast<std::size_t>(row)] = col;
    ++pivots_;
  }

  // Rebuilds the tableau as B^{-1} [A | b] from the original data so that
  // rounding does not accumulate across pivots.
  bool refactor() {
    Matrix basis_matrix(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      basis_matrix.col(i) = original_.col(basis_[static_cast<std::size_t>(i)]);
    }
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    Matrix block(m_, total_ + 1);
    block.leftCols(total_) = original_;
    block.col(total_) = rhs_;
    const Matrix fresh = lu.solve(block);
    if (!fresh.allFinite()) return false;
    const double scale = std::max(1.0, rhs_.cwiseAbs().maxCoeff());
    if ((basis_matrix * fresh.col(total_) - rhs_).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
    tableau_.topRows(m_) = fresh;
    for (Index i = 0; i < m_; ++i) {
      const Index col = basis_[static_cast<std::size_t>(i)];
      tableau_.col(col).head(m_).setZero();
      tableau_(i, col) = 1.0;
      if (tableau_(i, total_) < 0.0 && tableau_(i, total_) > -1e-9 * scale) tableau_(i, total_) = 0.0;
    }
    set_objective(Vector(cost_));
    return true;
  }

  LpStatus iterate(Index column_limit) {
    const double tol = options_.tolerance;
    int degenerate_run = 0;
    bool bland = false;
    int since_refactor = 0;
    for (;;) {
      if (pivots_ >= options_.max_pivots) return LpStatus::IterationLimit;
      if (since_refactor >= kRefactorInterval) {
        refactor();
        since_refactor = 0;
      }
      Index entering = -1;
      double most_negative = -tol;
      for (Index j = 0; j < column_limit; ++j) {
        const double reduced = tableau_(m_, j);
        if (bland) {
          if (reduced < -tol) {
            entering = j;
            break;
          }
        } else if (reduced < most_negative) {
          most_negative = reduced;
          entering = j;
        }
      }
      if (entering < 0) {
        if (since_refactor == 0 || !refactor()) return LpStatus::Optimal;
        since_refactor = 0;
        continue;
      }

      // Two-pass ratio test: the first pass bounds the step with a small
      // feasibility allowance, the second picks among rows within that bound
      // the largest pivot (or the smallest basic index once Bland's rule is on).
      double column_max = 0.0;
      for (Index i = 0; i < m_; ++i) column_max = std::max(column_max, tableau_(i, entering));
      const double pivot_tol = std::max(tol, 1e-9 * column_max);
      double theta = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double a = tableau_(i, entering);
        if (a <= pivot_tol) continue;
        theta = std::min(theta, (std::max(tableau_(i, total_), 0.0) + kFeasibilitySlack) / a);
      }
      Index leaving = -1;
      for (Index i = 0; i < m_; ++i) {
        const double a = tableau_(i, entering);
        if (a <= pivot_tol || std::max(tableau_(i, total_), 0.0) / a > theta) continue;
        if (leaving < 0) {
          leaving = i;
        } else if (bland) {
          if (basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)]) leaving = i;
        } else if (a > tableau_(leaving, entering)) {
          leaving = i;
        }
      }
      if (leaving < 0) {
        if (since_refactor == 0 || !refactor()) return LpStatus::Unbounded;
        since_refactor = 0;
        continue;
      }

      if (tableau_(leaving, total_) <= tol) {
        if (++degenerate_run > options_.degenerate_limit) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(leaving, entering);
      ++since_refactor;
    }
  }

  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_ + m_) continue;
      Index best = -1;
      double best_abs = options_.tolerance;
      for (Index j = 0; j < n_ + m_; ++j) {
        if (std::abs(tableau_(i, j)) > best_abs) {
          best_abs = std::abs(tableau_(i, j));
          best = j;
        }
      }
      // A row with no eligible column is redundant; its artificial stays
      // basic at zero and is never priced again.
      if (best >= 0) pivot(i, best);
    }
  }

  Vector refined_solution() const {
    Vector full = Vector::Zero(total_);
    Matrix basis_matrix(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      basis_matrix.col(i) = original_.col(basis_[static_cast<std::size_t>(i)]);
    }
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    Vector xb = lu.solve(rhs_);
    const double scale = std::max(1.0, rhs_.cwiseAbs().maxCoeff());
    const bool usable = xb.allFinite() && (basis_matrix * xb - rhs_).cwiseAbs().maxCoeff() <= 1e-9 * scale &&
                        xb.minCoeff() >= -1e-9 * scale;
    for (Index i = 0; i < m_; ++i) {
      const double value = usable ? xb(i) : tableau_(i, total_);
      full(basis_[static_cast<std::size_t>(i)]) = std::max(0.0, value);
    }
    return full.head(n_);
  }

  static constexpr int kRefactorInterval = 16;
  static constexpr double kFeasibilitySlack = 1e-12;

  LpOptions options_;
  Vector cost_;
  Index m_;
  Index n_;
  Index artificials_ = 0;
  Index total_ = 0;
  Matrix original_;
  Vector rhs_;
  Tableau tableau_;
  std::vector<Index> basis_;
  int pivots_ = 0;
};

}  // namespace

namespace {
thread_local LpOptions thread_defaults;
}  // namespace

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& options) {
  TableauSolver solver(A, b, options);
  return solver.solve(c);
}

LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c) {
  return solve_lp(A, b, c, thread_defaults);
}

const LpOptions& default_lp_options() { return thread_defaults; }

ScopedLpTolerance::ScopedLpTolerance(double tolerance) : saved_(thread_defaults.tolerance) {
  thread_defaults.tolerance = tolerance;
}

ScopedLpTolerance::~ScopedLpTolerance() { thread_defaults.tolerance = saved_; }

}  // namespace lethargy
