#include "ucscreen/lp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace ucscreen::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
    case Status::NodeLimit: return "node_limit";
  }
  return "unknown";
}

int Model::add_column(std::string name, double lo, double hi, double cost, bool integer) {
  if (lo > hi) throw std::invalid_argument("column '" + name + "' has lo > hi");
  columns_.push_back(Column{std::move(name), lo, hi, cost, integer});
  return static_cast<int>(columns_.size()) - 1;
}

int Model::add_row(std::string name, std::vector<Term> terms, double lo, double hi) {
  for (const auto& t : terms) {
    if (t.col < 0 || static_cast<std::size_t>(t.col) >= columns_.size())
      throw std::out_of_range("row '" + name + "' references unknown column");
  }
  rows_.push_back(Row{std::move(name), std::move(terms), lo, hi});
  return static_cast<int>(rows_.size()) - 1;
}

std::size_t Model::num_integer() const {
  return static_cast<std::size_t>(
      std::count_if(columns_.begin(), columns_.end(), [](const Column& c) { return c.integer; }));
}

double Model::objective_value(const std::vector<double>& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < columns_.size(); ++j) v += columns_[j].cost * x[j];
  return v;
}

double Model::row_activity(std::size_t row, const std::vector<double>& x) const {
  double v = 0.0;
  for (const auto& t : rows_[row].terms) v += t.coef * x[static_cast<std::size_t>(t.col)];
  return v;
}

double Model::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    worst = std::max(worst, columns_[j].lo - x[j]);
    worst = std::max(worst, x[j] - columns_[j].hi);
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double a = row_activity(i, x);
    worst = std::max(worst, rows_[i].lo - a);
    worst = std::max(worst, a - rows_[i].hi);
  }
  return worst;
}

namespace {

void append_number(std::ostringstream& os, double v) {
  if (v == kInf) os << "+inf";
  else if (v == -kInf) os << "-inf";
  else os << v;
}

}  // namespace

std::string Model::to_lp_text() const {
  std::ostringstream os;
  os.precision(12);
  os << (sense == Sense::Minimize ? "Minimize" : "Maximize") << "\n obj:";
  for (const auto& c : columns_) {
    if (c.cost != 0.0) os << (c.cost < 0 ? " - " : " + ") << std::abs(c.cost) << ' ' << c.name;
  }
  os << "\nSubject To\n";
  for (const auto& r : rows_) {
    os << ' ' << r.name << ": ";
    if (r.lo != -kInf && r.lo != r.hi) {
      append_number(os, r.lo);
      os << " <=";
    }
    for (const auto& t : r.terms) {
      os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << ' ' << columns_[static_cast<std::size_t>(t.col)].name;
    }
    if (r.lo == r.hi) {
      os << " = ";
      append_number(os, r.hi);
    } else if (r.hi != kInf) {
      os << " <= ";
      append_number(os, r.hi);
    }
    os << '\n';
  }
  os << "Bounds\n";
  for (const auto& c : columns_) {
    os << ' ';
    append_number(os, c.lo);
    os << " <= " << c.name << " <= ";
    append_number(os, c.hi);
    os << '\n';
  }
  os << "Generals\n";
  for (const auto& c : columns_) {
    if (c.integer) os << ' ' << c.name << '\n';
  }
  os << "End\n";
  return os.str();
}

namespace {

// Dense bounded-variable primal simplex on the homogeneous system
//   A x - s = 0,  lo <= (x, s) <= hi
// where s are row activities. Phase 1 adds an artificial to each row whose
// starting activity is out of range.
class DenseSimplex {
 public:
  DenseSimplex(const Model& model, const std::vector<double>& col_lo, const std::vector<double>& col_hi,
               const LpOptions& options)
      : model_(model), opt_(options) {
    n_ = model.num_columns();
    m_ = model.num_rows();
    setup(col_lo, col_hi);
  }

  Solution run() {
    Solution sol;
    if (num_art_ > 0) {
      std::vector<double> c(ncols_, 0.0);
      for (std::size_t k = 0; k < num_art_; ++k) c[n_ + m_ + k] = 1.0;
      set_costs(c);
      const Status st = iterate(/*phase1=*/true);
      sol.iterations = iterations_;
      if (st == Status::IterationLimit) {
        sol.status = st;
        return sol;
      }
      double infeas = 0.0;
      for (std::size_t k = 0; k < num_art_; ++k) infeas += x_[n_ + m_ + k];
      if (infeas > phase1_tol_) {
        sol.status = Status::Infeasible;
        return sol;
      }
      retire_artificials();
    }
    std::vector<double> c(ncols_, 0.0);
    const double sign = model_.sense == Sense::Minimize ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n_; ++j) c[j] = sign * model_.columns()[j].cost;
    set_costs(c);
    const Status st = iterate(/*phase1=*/false);
    sol.iterations = iterations_;
    sol.status = st;
    refresh_basics();
    sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    // Clean tiny bound noise on structural values.
    for (std::size_t j = 0; j < n_; ++j) {
      sol.x[j] = std::clamp(sol.x[j], lo_[j], hi_[j]);
    }
    sol.objective = model_.objective_value(sol.x);
    sol.bound = sol.objective;
    return sol;
  }

 private:
  double& tab(std::size_t i, std::size_t j) { return t_[i * ncols_ + j]; }
  double tab(std::size_t i, std::size_t j) const { return t_[i * ncols_ + j]; }

  void setup(const std::vector<double>& col_lo, const std::vector<double>& col_hi) {
    const auto& rows = model_.rows();
    std::vector<double> start(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double lo = col_lo[j], hi = col_hi[j];
      start[j] = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    }
    std::vector<double> activity(m_, 0.0);
    std::vector<bool> needs_art(m_, false);
    double scale = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& t : rows[i].terms) activity[i] += t.coef * start[static_cast<std::size_t>(t.col)];
      const double tol = opt_.feasibility_tol * (1.0 + std::abs(activity[i]));
      needs_art[i] = activity[i] < rows[i].lo - tol || activity[i] > rows[i].hi + tol;
      if (needs_art[i]) ++num_art_;
      scale = std::max(scale, std::abs(activity[i]));
    }
    for (double v : start) {
      if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
    }
    phase1_tol_ = 1e-7 * scale;

    ncols_ = n_ + m_ + num_art_;
    t_.assign(m_ * ncols_, 0.0);
    lo_.assign(ncols_, 0.0);
    hi_.assign(ncols_, 0.0);
    x_.assign(ncols_, 0.0);
    basis_.assign(m_, 0);
    pos_.assign(ncols_, -1);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = col_lo[j];
      hi_[j] = col_hi[j];
      x_[j] = start[j];
    }
    std::size_t art = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      lo_[s] = rows[i].lo;
      hi_[s] = rows[i].hi;
      if (!needs_art[i]) {
        for (const auto& t : rows[i].terms) tab(i, static_cast<std::size_t>(t.col)) -= t.coef;
        tab(i, s) = 1.0;
        x_[s] = activity[i];
        basis_[i] = s;
        pos_[s] = static_cast<long>(i);
      } else {
        const double target = activity[i] < rows[i].lo ? rows[i].lo : rows[i].hi;
        const double resid = activity[i] - target;
        const double sigma = resid > 0 ? -1.0 : 1.0;
        for (const auto& t : rows[i].terms) tab(i, static_cast<std::size_t>(t.col)) += t.coef / sigma;
        tab(i, s) = -1.0 / sigma;
        tab(i, art) = 1.0;
        x_[s] = target;
        x_[art] = std::abs(resid);
        lo_[art] = 0.0;
        hi_[art] = kInf;
        basis_[i] = art;
        pos_[art] = static_cast<long>(i);
        ++art;
      }
    }
  }

  void set_costs(const std::vector<double>& c) {
    c_ = c;
    d_ = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * ncols_];
      for (std::size_t j = 0; j < ncols_; ++j) d_[j] -= cb * row[j];
    }
  }

  void refresh_basics() {
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &t_[i * ncols_];
      double v = 0.0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (pos_[j] < 0 && row[j] != 0.0) v -= row[j] * x_[j];
      }
      x_[basis_[i]] = v;
    }
  }

  bool eligible_column(std::size_t j, bool phase1) const {
    if (pos_[j] >= 0) return false;
    if (!phase1 && j >= n_ + m_) return false;
    return lo_[j] != hi_[j];
  }

  void pivot(std::size_t r, std::size_t j) {
    double* prow = &t_[r * ncols_];
    const double inv = 1.0 / prow[j];
    for (std::size_t k = 0; k < ncols_; ++k) prow[k] *= inv;
    prow[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * ncols_];
      const double f = row[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < ncols_; ++k) row[k] -= f * prow[k];
      row[j] = 0.0;
    }
    const double fd = d_[j];
    if (fd != 0.0) {
      for (std::size_t k = 0; k < ncols_; ++k) d_[k] -= fd * prow[k];
      d_[j] = 0.0;
    }
    pos_[basis_[r]] = -1;
    basis_[r] = j;
    pos_[j] = static_cast<long>(r);
  }

  Status iterate(bool phase1) {
    constexpr double kPivotTol = 1e-9;
    long degenerate_run = 0;
    bool bland = false;
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return Status::IterationLimit;

      // Pricing.
      std::size_t enter = ncols_;
      double best = 0.0;
      int dir = 0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (!eligible_column(j, phase1)) continue;
        const double dj = d_[j];
        int cand_dir = 0;
        if (dj < -opt_.optimality_tol && x_[j] < hi_[j]) cand_dir = 1;
        else if (dj > opt_.optimality_tol && x_[j] > lo_[j]) cand_dir = -1;
        if (cand_dir == 0) continue;
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter == ncols_) return Status::Optimal;

      // Ratio test.
      double step = kInf;
      std::size_t leave_row = m_;
      double leave_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = tab(i, enter) * dir;
        if (std::abs(alpha) <= kPivotTol) continue;
        const std::size_t b = basis_[i];
        double limit = kInf;
        if (alpha > 0 && std::isfinite(lo_[b])) limit = std::max(0.0, (x_[b] - lo_[b]) / alpha);
        else if (alpha < 0 && std::isfinite(hi_[b])) limit = std::max(0.0, (hi_[b] - x_[b]) / -alpha);
        if (!std::isfinite(limit)) continue;
        bool take = false;
        if (limit < step - 1e-12) take = true;
        else if (limit <= step + 1e-12 && leave_row < m_) {
          take = bland ? basis_[i] < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          step = limit;
          leave_row = i;
          leave_alpha = alpha;
        }
      }
      const double flip = hi_[enter] - lo_[enter];
      if (!std::isfinite(step) && !std::isfinite(flip)) return Status::Unbounded;

      ++iterations_;
      const bool do_flip = std::isfinite(flip) && flip <= step;
      const double t = do_flip ? flip : step;
      if (t <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (t != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = tab(i, enter);
          if (a != 0.0) x_[basis_[i]] -= a * dir * t;
        }
      }
      if (do_flip) {
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }
      x_[enter] += dir * t;
      const std::size_t leaving = basis_[leave_row];
      x_[leaving] = leave_alpha > 0 ? lo_[leaving] : hi_[leaving];
      pivot(leave_row, enter);
      if (iterations_ % 64 == 0) refresh_basics();
    }
  }

  void retire_artificials() {
    for (std::size_t k = 0; k < num_art_; ++k) {
      const std::size_t a = n_ + m_ + k;
      hi_[a] = 0.0;
      if (pos_[a] < 0) {
        x_[a] = 0.0;
        continue;
      }
      const auto r = static_cast<std::size_t>(pos_[a]);
      std::size_t best = ncols_;
      double best_mag = 1e-9;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (pos_[j] >= 0) continue;
        const double mag = std::abs(tab(r, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best == ncols_) continue;  // redundant row; artificial stays basic at zero
      pivot(r, best);
      x_[a] = 0.0;
    }
    refresh_basics();
  }

  const Model& model_;
  LpOptions opt_;
  std::size_t n_ = 0, m_ = 0, num_art_ = 0, ncols_ = 0;
  double phase1_tol_ = 1e-7;
  std::vector<double> t_;
  std::vector<double> lo_, hi_, x_, c_, d_;
  std::vector<std::size_t> basis_;
  std::vector<long> pos_;
  long iterations_ = 0;
};

Solution solve_with_bounds(const Model& model, const std::vector<double>& lo, const std::vector<double>& hi,
                           const LpOptions& options) {
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (lo[j] > hi[j]) {
      Solution s;
      s.status = Status::Infeasible;
      return s;
    }
  }
  DenseSimplex simplex(model, lo, hi, options);
  return simplex.run();
}

}  // namespace

Solution solve_lp(const Model& model, const LpOptions& options) {
  std::vector<double> lo, hi;
  lo.reserve(model.num_columns());
  hi.reserve(model.num_columns());
  for (const auto& c : model.columns()) {
    lo.push_back(c.lo);
    hi.push_back(c.hi);
  }
  return solve_with_bounds(model, lo, hi, options);
}

namespace {

struct Node {
  double bound;
  long depth;
  long order;
  std::vector<double> lo, hi;
};

struct NodeCompare {
  // Best bound first; deeper nodes break ties so incumbents show up early.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.order > b.order;
  }
};

}  // namespace

Solution solve_mip(const Model& model, const MipOptions& options) {
  // Work in minimization internally.
  const double sign = model.sense == Sense::Minimize ? 1.0 : -1.0;
  const auto& cols = model.columns();

  Node root{-kInf, 0, 0, {}, {}};
  for (const auto& c : cols) {
    double lo = c.lo, hi = c.hi;
    if (c.integer) {
      lo = std::isfinite(lo) ? std::ceil(lo - options.integrality_tol) : lo;
      hi = std::isfinite(hi) ? std::floor(hi + options.integrality_tol) : hi;
    }
    root.lo.push_back(lo);
    root.hi.push_back(hi);
  }

  Solution best;
  best.status = Status::Infeasible;
  double incumbent = kInf;
  long nodes = 0;
  long iterations = 0;
  long order = 0;

  auto prune_tol = [&](double inc) {
    return std::max(1e-9 * (1.0 + std::abs(inc)), options.gap * std::max(1.0, std::abs(inc)));
  };

  std::priority_queue<Node, std::vector<Node>, NodeCompare> open;
  open.push(std::move(root));
  double final_bound = kInf;
  bool hit_limit = false;

  while (!open.empty()) {
    if (open.top().bound >= incumbent - prune_tol(incumbent)) {
      final_bound = std::min(final_bound, open.top().bound);
      break;
    }
    if (nodes >= options.max_nodes) {
      hit_limit = true;
      final_bound = std::min(final_bound, open.top().bound);
      break;
    }
    Node node = open.top();
    open.pop();
    ++nodes;

    Solution relax = solve_with_bounds(model, node.lo, node.hi, options.lp);
    iterations += relax.iterations;
    if (relax.status == Status::Infeasible) continue;
    if (relax.status == Status::Unbounded) {
      if (nodes == 1) {
        best.status = Status::Unbounded;
        best.nodes = nodes;
        best.iterations = iterations;
        return best;
      }
      continue;
    }
    if (relax.status == Status::IterationLimit) {
      best.status = Status::IterationLimit;
      best.nodes = nodes;
      best.iterations = iterations;
      return best;
    }
    const double value = sign * relax.objective;
    if (value >= incumbent - prune_tol(incumbent)) continue;

    std::size_t branch = cols.size();
    double worst_frac = options.integrality_tol;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (!cols[j].integer) continue;
      const double v = relax.x[j];
      const double frac = std::abs(v - std::round(v));
      if (frac > worst_frac) {
        worst_frac = frac;
        branch = j;
      }
    }
    if (branch == cols.size()) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].integer) relax.x[j] = std::round(relax.x[j]);
      }
      incumbent = value;
      best = std::move(relax);
      best.objective = model.objective_value(best.x);
      continue;
    }
    const double v = relax.x[branch];
    Node down{value, node.depth + 1, ++order, node.lo, node.hi};
    down.hi[branch] = std::floor(v);
    Node up{value, node.depth + 1, ++order, std::move(node.lo), std::move(node.hi)};
    up.lo[branch] = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  best.nodes = nodes;
  best.iterations = iterations;
  if (!std::isfinite(incumbent)) {
    best.status = hit_limit ? Status::NodeLimit : Status::Infeasible;
    return best;
  }
  best.status = hit_limit ? Status::NodeLimit : Status::Optimal;
  const double bound_min = std::min(final_bound, incumbent);
  best.bound = sign * bound_min;
  return best;
}

}  // namespace ucscreen::lp
