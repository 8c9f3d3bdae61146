#include "hdbell/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "hdbell/error.hpp"

namespace hdbell {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIterations: return "max-iterations";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Linear programming

void LinearProgram::validate() const {
  const Eigen::Index n = objective.size();
  const auto bad = [](const std::string& what) {
    throw Error(ErrorCode::DimensionMismatch, "LinearProgram: " + what);
  };
  if (a_ub.rows() != b_ub.size() || (a_ub.rows() > 0 && a_ub.cols() != n)) bad("inequality block");
  if (a_eq.rows() != b_eq.size() || (a_eq.rows() > 0 && a_eq.cols() != n)) bad("equality block");
  if (lower.size() != 0 && lower.size() != n) bad("lower bounds");
  if (upper.size() != 0 && upper.size() != n) bad("upper bounds");
  if (!objective.allFinite() || !a_ub.allFinite() || !b_ub.allFinite() || !a_eq.allFinite() ||
      !b_eq.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "LinearProgram: non-finite data");
  }
}

namespace {

// Original variable j = shift_j + sum over (column, sign) of sign * x_col.
struct VarMap {
  double shift = 0.0;
  std::vector<std::pair<int, double>> parts;
};

class Tableau {
 public:
  Tableau(RMatrix t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  RMatrix& t() { return t_; }
  std::vector<int>& basis() { return basis_; }
  long pivots() const { return pivots_; }

  void pivot(int r, int q) {
    const double piv = t_(r, q);
    t_.row(r) /= piv;
    RVector col = t_.col(q);
    col(r) = 0.0;
    t_.noalias() -= col * t_.row(r);
    t_.col(q).setZero();
    t_(r, q) = 1.0;
    basis_[r] = q;
    ++pivots_;
  }

  // Maximizes the objective encoded in the last row (entries are reduced
  // costs z_j - c_j). Dantzig pricing with a Harris two-pass ratio test;
  // Bland's rule takes over after a run of degenerate pivots.
  SolveStatus run(int allowed_cols, double dj_tol, long max_pivots, int degenerate_switch) {
    const int m = int(t_.rows()) - 1;
    const int rhs = int(t_.cols()) - 1;
    int degenerate = 0;
    while (true) {
      if (pivots_ >= max_pivots) return SolveStatus::MaxIterations;
      const bool bland = degenerate >= degenerate_switch;
      int q = -1;
      double best = -dj_tol;
      for (int j = 0; j < allowed_cols; ++j) {
        const double rc = t_(m, j);
        if (rc < best) {
          q = j;
          if (bland) break;
          best = rc;
        }
      }
      if (q < 0) return SolveStatus::Optimal;
      const int r = bland ? bland_row(q) : harris_row(q);
      if (r < 0) return SolveStatus::Unbounded;
      const double step = std::max(t_(r, rhs), 0.0) / t_(r, q);
      degenerate = step <= kFeasTol ? degenerate + 1 : 0;
      pivot(r, q);
    }
  }

  // Dual simplex pivots until the right-hand side is nonnegative; reduced
  // costs stay dual feasible. Returns false if a row proves infeasibility.
  bool restore_primal(int allowed_cols, long max_pivots) {
    const int m = int(t_.rows()) - 1;
    const int rhs = int(t_.cols()) - 1;
    while (pivots_ < max_pivots) {
      int r = -1;
      double worst = -kFeasTol;
      for (int i = 0; i < m; ++i) {
        if (t_(i, rhs) < worst) {
          worst = t_(i, rhs);
          r = i;
        }
      }
      if (r < 0) return true;
      int q = -1;
      double ratio = kInf;
      for (int j = 0; j < allowed_cols; ++j) {
        const double a = t_(r, j);
        if (a >= -kPivotTol) continue;
        const double v = std::max(t_(m, j), 0.0) / -a;
        if (v < ratio) {
          ratio = v;
          q = j;
        }
      }
      if (q < 0) return false;
      pivot(r, q);
    }
    return false;
  }

  static constexpr double kPivotTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;

 private:
  int harris_row(int q) const {
    const int m = int(t_.rows()) - 1;
    const int rhs = int(t_.cols()) - 1;
    double theta = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = t_(i, q);
      if (a > kPivotTol) theta = std::min(theta, (std::max(t_(i, rhs), 0.0) + kFeasTol) / a);
    }
    if (theta == kInf) return -1;
    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = t_(i, q);
      if (a > kPivotTol && std::max(t_(i, rhs), 0.0) / a <= theta && a > best) {
        best = a;
        r = i;
      }
    }
    return r;
  }

  int bland_row(int q) const {
    const int m = int(t_.rows()) - 1;
    const int rhs = int(t_.cols()) - 1;
    int r = -1;
    double ratio = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = t_(i, q);
      if (a <= kPivotTol) continue;
      const double v = std::max(t_(i, rhs), 0.0) / a;
      if (v < ratio - 1e-14 || (v <= ratio + 1e-14 && r >= 0 && basis_[i] < basis_[r])) {
        ratio = std::min(ratio, v);
        r = i;
      }
    }
    return r;
  }

  RMatrix t_;
  std::vector<int> basis_;
  long pivots_ = 0;
};

// Standard form: maximize c^T x  s.t.  A x = b,  x >= 0,  b >= 0.
struct StandardForm {
  std::vector<VarMap> vars;
  RMatrix a;
  RVector b;
  RVector c;
  std::vector<double> flip;
  std::vector<int> slack_row;  // column of the +1 slack usable as a start basis, or -1
  int ns = 0;
  int m_ub = 0;
  bool infeasible = false;
};

StandardForm to_standard(const LinearProgram& lp, double sense) {
  StandardForm sf;
  const int n = lp.num_vars();
  sf.vars.resize(n);
  std::vector<double> cost;
  std::vector<std::pair<int, double>> extra_rows;  // x_col <= upper
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower.size() ? lp.lower(j) : -kInf;
    const double up = lp.upper.size() ? lp.upper(j) : kInf;
    if (lo > up) {
      sf.infeasible = true;
      return sf;
    }
    const double c = sense * lp.objective(j);
    VarMap& v = sf.vars[j];
    if (std::isfinite(lo)) {
      v.shift = lo;
      v.parts.push_back({sf.ns, 1.0});
      cost.push_back(c);
      if (std::isfinite(up)) extra_rows.push_back({sf.ns, up - lo});
      ++sf.ns;
    } else if (std::isfinite(up)) {
      v.shift = up;
      v.parts.push_back({sf.ns, -1.0});
      cost.push_back(-c);
      ++sf.ns;
    } else {
      v.parts.push_back({sf.ns, 1.0});
      v.parts.push_back({sf.ns + 1, -1.0});
      cost.push_back(c);
      cost.push_back(-c);
      sf.ns += 2;
    }
  }

  sf.m_ub = int(lp.a_ub.rows() + extra_rows.size());
  const int m_eq = int(lp.a_eq.rows());
  const int m = sf.m_ub + m_eq;
  const int nc = sf.ns + sf.m_ub;
  sf.a = RMatrix::Zero(m, nc);
  sf.b.resize(m);
  const auto fill = [&](int row, const auto& coeffs, double rhs) {
    double shifted = rhs;
    for (int j = 0; j < n; ++j) {
      const double v = coeffs(j);
      if (v == 0.0) continue;
      shifted -= v * sf.vars[j].shift;
      for (auto [col, s] : sf.vars[j].parts) sf.a(row, col) += s * v;
    }
    sf.b(row) = shifted;
  };
  for (int i = 0; i < lp.a_ub.rows(); ++i) fill(i, lp.a_ub.row(i), lp.b_ub(i));
  for (std::size_t k = 0; k < extra_rows.size(); ++k) {
    const int row = int(lp.a_ub.rows() + k);
    sf.a(row, extra_rows[k].first) = 1.0;
    sf.b(row) = extra_rows[k].second;
  }
  for (int i = 0; i < sf.m_ub; ++i) sf.a(i, sf.ns + i) = 1.0;
  for (int i = 0; i < m_eq; ++i) fill(sf.m_ub + i, lp.a_eq.row(i), lp.b_eq(i));

  sf.c = RVector::Zero(nc);
  for (int j = 0; j < sf.ns; ++j) sf.c(j) = cost[j];
  sf.flip.assign(m, 1.0);
  sf.slack_row.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    if (sf.b(i) < 0.0) {
      sf.flip[i] = -1.0;
      sf.a.row(i) *= -1.0;
      sf.b(i) = -sf.b(i);
    } else if (i < sf.m_ub) {
      sf.slack_row[i] = sf.ns + i;
    }
  }
  return sf;
}

// Rows of the equality block that are linear combinations of other rows.
// Returns the rows to keep; sets `consistent` to false when a dropped row
// contradicts the rows it depends on. Slack columns make inequality rows
// independent of everything else, so only equality rows are examined.
std::vector<int> independent_rows(const StandardForm& sf, bool& consistent) {
  const int m = int(sf.a.rows());
  const int m_eq = m - sf.m_ub;
  consistent = true;
  std::vector<int> rows(m);
  std::iota(rows.begin(), rows.end(), 0);
  if (m_eq < 2) return rows;
  Eigen::ColPivHouseholderQR<RMatrix> qr(sf.a.bottomRows(m_eq).transpose());
  qr.setThreshold(1e-10);
  const int rank = int(qr.rank());
  if (rank == m_eq) return rows;
  std::vector<int> kept, dropped;
  for (int k = 0; k < m_eq; ++k) {
    (k < rank ? kept : dropped).push_back(sf.m_ub + int(qr.colsPermutation().indices()(k)));
  }
  const RMatrix kt = sf.a(kept, Eigen::all).transpose();
  const RMatrix w = kt.colPivHouseholderQr().solve(RMatrix(sf.a(dropped, Eigen::all).transpose()));
  const RVector implied = w.transpose() * RVector(sf.b(kept));
  const double scale = 1.0 + sf.b.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < dropped.size(); ++k) {
    if (std::abs(implied(Eigen::Index(k)) - sf.b(dropped[k])) > 1e-7 * scale) consistent = false;
  }
  rows.resize(sf.m_ub);
  rows.insert(rows.end(), kept.begin(), kept.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

struct CoreResult {
  SolveStatus status = SolveStatus::MaxIterations;
  RVector x;  // standard columns
  RVector y;  // one per row passed in
  int iterations = 0;
};

// Two-phase dense simplex on a full-row-rank standard form.
CoreResult simplex_core(const RMatrix& a, const RVector& b, const RVector& c,
                        const std::vector<int>& slack_col, const LpOptions& opt) {
  const int m = int(a.rows());
  const int nc = int(a.cols());
  CoreResult out;
  std::vector<int> art_rows;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    if (slack_col[i] >= 0) {
      basis[i] = slack_col[i];
    } else {
      basis[i] = nc + int(art_rows.size());
      art_rows.push_back(i);
    }
  }
  const int na = int(art_rows.size());
  RMatrix t = RMatrix::Zero(m + 1, nc + na + 1);
  t.topLeftCorner(m, nc) = a;
  t.col(nc + na).head(m) = b;
  for (int k = 0; k < na; ++k) t(art_rows[k], nc + k) = 1.0;

  const double scale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  const long max_pivots = opt.max_pivots > 0 ? opt.max_pivots : 50L * (m + nc + na + 1);

  Tableau tab(std::move(t), basis);
  RMatrix& T = tab.t();

  // Phase 1: maximize -sum(artificials).
  if (na > 0) {
    for (int k = 0; k < na; ++k) T.row(m) -= T.row(art_rows[k]);
    for (int k = 0; k < na; ++k) T(m, nc + k) = 0.0;
    const SolveStatus s1 = tab.run(nc, opt.tol, max_pivots, opt.degenerate_switch);
    out.iterations = int(tab.pivots());
    if (s1 == SolveStatus::MaxIterations) return out;
    if (-T(m, nc + na) > opt.tol * scale * 10.0) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
  }

  // Drive remaining (zero-valued) artificials out of the basis.
  for (int i = 0; i < m; ++i) {
    if (tab.basis()[i] < nc) continue;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < nc; ++j) {
      if (std::abs(T(i, j)) > best) {
        best = std::abs(T(i, j));
        q = j;
      }
    }
    if (q < 0 || best < 1e-12) {
      throw Error(ErrorCode::NumericalFailure, "simplex: rank-deficient basis after phase 1");
    }
    tab.pivot(i, q);
  }

  // Phase 2 with artificial columns frozen out.
  RMatrix t2(m + 1, nc + 1);
  t2.topLeftCorner(m, nc) = T.topLeftCorner(m, nc);
  t2.col(nc).head(m) = T.col(nc + na).head(m);
  t2.row(m).head(nc) = -c.transpose();
  t2(m, nc) = 0.0;
  for (int i = 0; i < m; ++i) t2.row(m) += c(tab.basis()[i]) * t2.row(i);

  // A small deterministic perturbation of the basic values breaks the ties
  // that stall pivoting on degenerate vertices. It stays within the range of
  // the current basis, so feasibility is preserved, and is removed below.
  for (int i = 0; i < m; ++i) {
    const double u = double((2654435761u * unsigned(i + 1)) % 1000u) / 1000.0;
    t2(i, nc) += opt.perturbation * (1.0 + u) * (1.0 + std::abs(t2(i, nc)));
  }
  Tableau tab2(std::move(t2), tab.basis());
  out.status = tab2.run(nc, opt.tol, max_pivots, opt.degenerate_switch);
  const auto basis_matrix = [&] {
    RMatrix bm(m, m);
    for (int i = 0; i < m; ++i) bm.col(i) = a.col(tab2.basis()[i]);
    return bm;
  };
  if (out.status == SolveStatus::Optimal) {
    tab2.t().col(nc).head(m) = Eigen::PartialPivLU<RMatrix>(basis_matrix()).solve(b);
    if (!tab2.restore_primal(nc, max_pivots)) out.status = SolveStatus::MaxIterations;
  }
  out.iterations = int(tab.pivots() + tab2.pivots());
  if (out.status != SolveStatus::Optimal) return out;

  // Refine from the final basis: B x_B = b and B^T y = c_B.
  const Eigen::PartialPivLU<RMatrix> lu(basis_matrix());
  RVector cb(m);
  for (int i = 0; i < m; ++i) cb(i) = c(tab2.basis()[i]);
  const RVector xb = lu.solve(b);
  out.y = lu.transpose().solve(cb);
  out.x = RVector::Zero(nc);
  for (int i = 0; i < m; ++i) out.x(tab2.basis()[i]) = std::max(xb(i), 0.0);
  return out;
}

constexpr double kInteriorStallAccept = 1e-7;

// Mehrotra predictor-corrector on  min g^T x  s.t.  A x = b,  x >= 0,
// with g = -c. Dual iterates converge to the analytic centre of the optimal
// face, which makes the returned multipliers independent of pivoting order.
CoreResult interior_core(const RMatrix& a, const RVector& b, const RVector& c,
                         const std::vector<std::pair<int, int>>& free_pairs, const LpOptions& opt) {
  const int m = int(a.rows());
  const int n = int(a.cols());
  const RVector g = -c;
  CoreResult out;

  // Starting point in the style of Mehrotra's heuristic.
  const RMatrix aat = a * a.transpose();
  const Eigen::LDLT<RMatrix> aat_f(aat + 1e-12 * RMatrix::Identity(m, m));
  RVector x = a.transpose() * aat_f.solve(b);
  RVector y = aat_f.solve(a * g);
  RVector s = g - a.transpose() * y;
  x.array() += std::max(-1.5 * x.minCoeff(), 0.0);
  s.array() += std::max(-1.5 * s.minCoeff(), 0.0);
  {
    const double xs = x.dot(s);
    x.array() += 0.5 * xs / std::max(s.sum(), 1e-12) + 1e-2;
    s.array() += 0.5 * xs / std::max(x.sum(), 1e-12) + 1e-2;
  }

  const double bnorm = 1.0 + b.cwiseAbs().maxCoeff();
  const double gnorm = 1.0 + g.cwiseAbs().maxCoeff();
  const int max_iter = opt.max_pivots > 0 ? int(opt.max_pivots) : 200;
  const auto max_step = [](const RVector& v, const RVector& dv) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    }
    return alpha;
  };

  // Near the solution the normal equations lose accuracy; the best iterate
  // seen so far is kept and returned if progress stalls within a loose
  // multiple of the tolerance.
  double best_merit = kInf;
  RVector best_x, best_y;
  int since_best = 0;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it;
    const RVector rp = b - a * x;
    const RVector rd = g - a.transpose() * y - s;
    const double px = g.dot(x);
    const double dy = b.dot(y);
    const double mu = x.dot(s) / n;
    const double merit = std::max({rp.cwiseAbs().maxCoeff() / bnorm, rd.cwiseAbs().maxCoeff() / gnorm,
                                   std::abs(px - dy) / (1.0 + std::abs(px))});
    if (merit <= opt.tol) {
      out.status = SolveStatus::Optimal;
      out.x = x;
      out.y = -y;
      return out;
    }
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best_y = y;
      since_best = 0;
    } else if (++since_best >= 8) {
      break;
    }
    // Divergence of one side certifies (numerically) infeasibility of the other.
    if (x.cwiseAbs().maxCoeff() > 1e12 * bnorm && dy < px) {
      out.status = SolveStatus::Unbounded;
      return out;
    }
    if (y.cwiseAbs().maxCoeff() > 1e12 * gnorm) {
      out.status = SolveStatus::Infeasible;
      return out;
    }

    const RVector d = x.cwiseQuotient(s);
    RMatrix normal = a * d.asDiagonal() * a.transpose();
    normal.diagonal().array() += 1e-14 * (1.0 + normal.diagonal().maxCoeff());
    const Eigen::LDLT<RMatrix> nf(normal);
    const auto direction = [&](const RVector& rxs, RVector& dx, RVector& dyv, RVector& ds) {
      const RVector sinv_rxs = rxs.cwiseQuotient(s);
      dyv = nf.solve(rp - a * sinv_rxs + a * d.cwiseProduct(rd));
      ds = rd - a.transpose() * dyv;
      dx = sinv_rxs - d.cwiseProduct(ds);
      // Iterative refinement of A dx = rp; the other two block equations
      // are kept exact by construction.
      for (int pass = 0; pass < 2; ++pass) {
        const RVector e = rp - a * dx;
        const RVector ey = nf.solve(e);
        const RVector eds = -(a.transpose() * ey);
        dyv += ey;
        ds += eds;
        dx -= d.cwiseProduct(eds);
      }
    };

    RVector dxa, dya, dsa;
    direction(-x.cwiseProduct(s), dxa, dya, dsa);
    const double ap = max_step(x, dxa);
    const double ad = max_step(s, dsa);
    const double mu_aff = (x + ap * dxa).dot(s + ad * dsa) / n;
    const double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);

    RVector dx, dyv, ds;
    const RVector rxs =
        (sigma * mu - (x.cwiseProduct(s)).array() - (dxa.cwiseProduct(dsa)).array()).matrix();
    direction(rxs, dx, dyv, ds);
    const double sp = std::min(1.0, 0.99 * max_step(x, dx));
    const double sd = std::min(1.0, 0.99 * max_step(s, ds));
    x += sp * dx;
    y += sd * dyv;
    s += sd * ds;
    // Both halves of a split free variable tend to grow together; pulling
    // them down leaves A x unchanged and keeps the normal matrix bounded.
    for (auto [p, q] : free_pairs) {
      const double shift = std::min(x(p), x(q)) - std::max(mu, 1e-12);
      if (shift > 0.0) {
        x(p) -= shift;
        x(q) -= shift;
      }
    }
    if (!x.allFinite() || !y.allFinite()) break;
  }
  if (best_merit <= kInteriorStallAccept) {
    out.status = SolveStatus::Optimal;
    out.x = best_x;
    out.y = -best_y;
    return out;
  }
  out.status = SolveStatus::MaxIterations;
  return out;
}

}  // namespace

SolveReport solve_lp(const LinearProgram& lp, const LpOptions& opt) {
  lp.validate();
  const int n = lp.num_vars();
  const double sense = lp.maximize ? 1.0 : -1.0;
  SolveReport rep;
  const StandardForm sf = to_standard(lp, sense);
  if (sf.infeasible) {
    rep.status = SolveStatus::Infeasible;
    return rep;
  }
  bool consistent = true;
  const std::vector<int> rows = independent_rows(sf, consistent);
  if (!consistent) {
    rep.status = SolveStatus::Infeasible;
    return rep;
  }
  const RMatrix a = sf.a(rows, Eigen::all);
  const RVector b = sf.b(rows);
  std::vector<int> slack_col(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) slack_col[k] = sf.slack_row[rows[k]];

  std::vector<std::pair<int, int>> free_pairs;
  for (const VarMap& v : sf.vars) {
    if (v.parts.size() == 2) free_pairs.push_back({v.parts[0].first, v.parts[1].first});
  }
  const CoreResult core = opt.method == LpMethod::InteriorPoint
                              ? interior_core(a, b, sf.c, free_pairs, opt)
                              : simplex_core(a, b, sf.c, slack_col, opt);
  rep.iterations = core.iterations;
  rep.status = core.status;
  if (core.status != SolveStatus::Optimal) {
    rep.value = core.status == SolveStatus::Unbounded ? sense * kInf : 0.0;
    return rep;
  }

  rep.x.resize(n);
  for (int j = 0; j < n; ++j) {
    double v = sf.vars[j].shift;
    for (auto [col, s] : sf.vars[j].parts) v += s * core.x(col);
    rep.x(j) = v;
  }
  RVector ys = RVector::Zero(sf.a.rows());
  for (std::size_t k = 0; k < rows.size(); ++k) ys(rows[k]) = core.y(Eigen::Index(k));
  const int m_ub_user = int(lp.a_ub.rows());
  const int m_eq = int(lp.a_eq.rows());
  rep.dual.resize(m_ub_user + m_eq);
  for (int i = 0; i < m_ub_user; ++i) rep.dual(i) = sense * sf.flip[i] * ys(i);
  for (int i = 0; i < m_eq; ++i) {
    rep.dual(m_ub_user + i) = sense * sf.flip[sf.m_ub + i] * ys(sf.m_ub + i);
  }

  rep.value = lp.objective.dot(rep.x);
  rep.gap = std::abs(sf.c.dot(core.x) - sf.b.dot(ys));
  rep.primal_residual = (sf.a * core.x - sf.b).cwiseAbs().maxCoeff();
  const RVector reduced = sf.c - sf.a.transpose() * ys;
  rep.dual_residual = std::max(0.0, reduced.maxCoeff());
  return rep;
}

// ---------------------------------------------------------------------------
// Semidefinite programming

double block_dot(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double block_min_eigenvalue(const BlockMatrix& a) {
  double lo = kInf;
  for (const RMatrix& m : a) {
    if (m.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

namespace {

void check_blocks(const BlockMatrix& m, const std::vector<int>& sizes, const char* what) {
  if (m.size() != sizes.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string("SDP: block count of ") + what);
  }
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (m[k].rows() != sizes[k] || m[k].cols() != sizes[k]) {
      throw Error(ErrorCode::DimensionMismatch, std::string("SDP: block size of ") + what);
    }
    if (!m[k].allFinite()) throw Error(ErrorCode::InvalidArgument, "SDP: non-finite data");
    if ((m[k] - m[k].transpose()).norm() > 1e-12 * (1.0 + m[k].norm())) {
      throw Error(ErrorCode::InvalidArgument, std::string("SDP: asymmetric block in ") + what);
    }
  }
}

RMatrix symmetrized(const RMatrix& m) { return 0.5 * (m + m.transpose()).eval(); }

double block_norm(const BlockMatrix& a) { return std::sqrt(block_dot(a, a)); }

BlockMatrix zeros_like(const std::vector<int>& sizes) {
  BlockMatrix z;
  for (int s : sizes) z.push_back(RMatrix::Zero(s, s));
  return z;
}

// Largest alpha in (0, inf] with X + alpha dX PSD, given X = L L^T.
double max_step(const std::vector<Eigen::LLT<RMatrix>>& chol, const BlockMatrix& dx) {
  double alpha = kInf;
  for (std::size_t k = 0; k < dx.size(); ++k) {
    const auto& L = chol[k].matrixL();
    const RMatrix half = L.solve(dx[k]);
    const RMatrix half_t = half.transpose();
    const RMatrix full = L.solve(half_t);
    const RMatrix s = 0.5 * (full + full.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(s, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    if (lo < 0.0) alpha = std::min(alpha, -1.0 / lo);
  }
  return alpha;
}

struct Scaling {
  RMatrix g;      // W = G G^T
  RMatrix g_inv;  // G^{-1}
  RMatrix w;
  RVector v;      // scaled point V = diag(v)
};

// Standard-form core: min <C,X> s.t. <A_i,X> = b_i, X >= 0, with dual
// max b^T y s.t. Z = C - sum y_i A_i >= 0.
struct IpmResult {
  SolveStatus status = SolveStatus::MaxIterations;
  BlockMatrix x, z;
  RVector y;
  double pobj = 0.0, dobj = 0.0;
  double pres = 0.0, dres = 0.0, gap = 0.0;
  int iterations = 0;
};

IpmResult interior_point(const std::vector<int>& sizes, const BlockMatrix& c,
                         const std::vector<BlockMatrix>& a, const RVector& b,
                         const SdpOptions& opt) {
  const int m = int(a.size());
  const int nb = int(sizes.size());
  int n_total = 0;
  for (int s : sizes) n_total += s;

  // Vectorized constraint data per block for the Schur complement products.
  std::vector<RMatrix> avec(nb);
  for (int k = 0; k < nb; ++k) {
    avec[k].resize(Eigen::Index(sizes[k]) * sizes[k], m);
    for (int i = 0; i < m; ++i) {
      avec[k].col(i) = Eigen::Map<const RVector>(a[i][k].data(), a[i][k].size());
    }
  }
  const auto apply_a = [&](const BlockMatrix& x) {
    RVector r = RVector::Zero(m);
    for (int k = 0; k < nb; ++k) {
      r.noalias() += avec[k].transpose() * Eigen::Map<const RVector>(x[k].data(), x[k].size());
    }
    return r;
  };
  const auto apply_at = [&](const RVector& y) {
    BlockMatrix out(nb);
    for (int k = 0; k < nb; ++k) {
      RVector v = avec[k] * y;
      out[k] = Eigen::Map<RMatrix>(v.data(), sizes[k], sizes[k]);
    }
    return out;
  };

  const double norm_b = b.norm();
  const double norm_c = block_norm(c);
  double max_a = 0.0;
  double start_x = std::max(10.0, std::sqrt(double(n_total)));
  for (int i = 0; i < m; ++i) {
    const double na = block_norm(a[i]);
    max_a = std::max(max_a, na);
    start_x = std::max(start_x, n_total * (1.0 + std::abs(b(i))) / (1.0 + na));
  }
  const double start_z = std::max({10.0, std::sqrt(double(n_total)), norm_c, max_a});

  IpmResult res;
  res.x = zeros_like(sizes);
  res.z = zeros_like(sizes);
  for (int k = 0; k < nb; ++k) {
    res.x[k].diagonal().setConstant(start_x);
    res.z[k].diagonal().setConstant(start_z);
  }
  res.y = RVector::Zero(m);

  BlockMatrix& X = res.x;
  BlockMatrix& Z = res.z;
  RVector& y = res.y;
  const double gamma = opt.step_fraction;

  IpmResult best;
  double best_merit = kInf;

  for (int it = 0; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    const RVector rp = b - apply_a(X);
    BlockMatrix rd = apply_at(y);
    for (int k = 0; k < nb; ++k) rd[k] = c[k] - Z[k] - rd[k];
    res.pobj = block_dot(c, X);
    res.dobj = b.dot(y);
    const double xz = block_dot(X, Z);
    res.pres = rp.norm() / (1.0 + norm_b);
    res.dres = block_norm(rd) / (1.0 + norm_c);
    res.gap = std::max(xz, std::abs(res.pobj - res.dobj)) /
              (1.0 + std::abs(res.pobj) + std::abs(res.dobj));
    const double merit = std::max({res.pres, res.dres, res.gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = res;
    }
    if (merit <= opt.tol) {
      res.status = SolveStatus::Optimal;
      return res;
    }
    if (it == opt.max_iterations) break;

    // NT scaling per block.
    std::vector<Scaling> sc(nb);
    std::vector<Eigen::LLT<RMatrix>> chol_x(nb), chol_z(nb);
    bool ok = true;
    for (int k = 0; k < nb && ok; ++k) {
      chol_x[k].compute(X[k]);
      chol_z[k].compute(Z[k]);
      if (chol_x[k].info() != Eigen::Success || chol_z[k].info() != Eigen::Success) {
        ok = false;
        break;
      }
      const RMatrix L = chol_x[k].matrixL();
      RMatrix ltzl = L.transpose() * Z[k] * L;
      ltzl = symmetrized(ltzl);
      Eigen::SelfAdjointEigenSolver<RMatrix> es(ltzl);
      RVector lam = es.eigenvalues().cwiseMax(1e-300);
      const RVector q4 = lam.array().pow(-0.25);
      sc[k].g = L * es.eigenvectors() * q4.asDiagonal();
      sc[k].g_inv = lam.array().pow(0.25).matrix().asDiagonal() * es.eigenvectors().transpose() *
                    chol_x[k].matrixL().solve(RMatrix::Identity(sizes[k], sizes[k]));
      sc[k].w = sc[k].g * sc[k].g.transpose();
      sc[k].v = lam.array().sqrt();
    }
    if (!ok) break;

    // Schur complement M_ij = <A_i, W A_j W>.
    RMatrix schur = RMatrix::Zero(m, m);
    for (int k = 0; k < nb; ++k) {
      const int s = sizes[k];
      RMatrix waw(Eigen::Index(s) * s, m);
      for (int j = 0; j < m; ++j) {
        const RMatrix t = sc[k].w * a[j][k] * sc[k].w;
        waw.col(j) = Eigen::Map<const RVector>(t.data(), t.size());
      }
      schur.noalias() += avec[k].transpose() * waw;
    }
    schur = symmetrized(schur);
    Eigen::LLT<RMatrix> schur_llt(schur);
    Eigen::LDLT<RMatrix> schur_ldlt;
    const bool use_llt = schur_llt.info() == Eigen::Success;
    if (!use_llt) {
      schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
      schur_ldlt.compute(schur);
      if (schur_ldlt.info() != Eigen::Success) break;
    }
    const auto schur_solve = [&](const RVector& r) -> RVector {
      return use_llt ? RVector(schur_llt.solve(r)) : RVector(schur_ldlt.solve(r));
    };

    // Direction for a given complementarity target R (scaled space).
    BlockMatrix wrdw(nb);
    for (int k = 0; k < nb; ++k) wrdw[k] = sc[k].w * rd[k] * sc[k].w;
    const auto direction = [&](const BlockMatrix& rs, BlockMatrix& dx, RVector& dy,
                               BlockMatrix& dz) {
      BlockMatrix rc(nb);
      for (int k = 0; k < nb; ++k) {
        const RVector& v = sc[k].v;
        RMatrix s(sizes[k], sizes[k]);
        for (int i = 0; i < sizes[k]; ++i) {
          for (int j = 0; j < sizes[k]; ++j) s(i, j) = 2.0 * rs[k](i, j) / (v(i) + v(j));
        }
        rc[k] = sc[k].g * s * sc[k].g.transpose();
      }
      BlockMatrix tmp(nb);
      for (int k = 0; k < nb; ++k) tmp[k] = rc[k] - wrdw[k];
      dy = schur_solve(rp - apply_a(tmp));
      dz = apply_at(dy);
      dx.resize(nb);
      for (int k = 0; k < nb; ++k) {
        dz[k] = rd[k] - dz[k];
        dz[k] = symmetrized(dz[k]);
        dx[k] = rc[k] - sc[k].w * dz[k] * sc[k].w;
        dx[k] = symmetrized(dx[k]);
      }
    };

    const double mu = xz / n_total;
    BlockMatrix r_aff(nb);
    for (int k = 0; k < nb; ++k) r_aff[k] = -RMatrix(sc[k].v.array().square().matrix().asDiagonal());
    BlockMatrix dx, dz;
    RVector dy;
    direction(r_aff, dx, dy, dz);
    const double ap_aff = std::min(1.0, max_step(chol_x, dx));
    const double ad_aff = std::min(1.0, max_step(chol_z, dz));
    double xz_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      xz_aff += (X[k] + ap_aff * dx[k]).cwiseProduct(Z[k] + ad_aff * dz[k]).sum();
    }
    const double mu_aff = std::max(xz_aff, 0.0) / n_total;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    BlockMatrix r_cor(nb);
    for (int k = 0; k < nb; ++k) {
      const RMatrix dxs = sc[k].g_inv * dx[k] * sc[k].g_inv.transpose();
      const RMatrix dzs = sc[k].g.transpose() * dz[k] * sc[k].g;
      const RMatrix prod = dxs * dzs;
      r_cor[k] = -0.5 * (prod + prod.transpose());
      r_cor[k].diagonal().array() += sigma * mu - sc[k].v.array().square();
    }
    direction(r_cor, dx, dy, dz);
    const double ap = std::min(1.0, gamma * max_step(chol_x, dx));
    const double ad = std::min(1.0, gamma * max_step(chol_z, dz));
    for (int k = 0; k < nb; ++k) {
      X[k] += ap * dx[k];
      Z[k] += ad * dz[k];
    }
    y += ad * dy;
    if (ap < 1e-10 && ad < 1e-10) break;
  }
  best.status = SolveStatus::MaxIterations;
  return best;
}

}  // namespace

void SemidefiniteProgram::validate() const {
  check_blocks(f0, block_sizes, "F0");
  if (int(f.size()) != num_vars()) {
    throw Error(ErrorCode::DimensionMismatch, "SDP: one F_i per variable required");
  }
  for (const auto& fi : f) check_blocks(fi, block_sizes, "F_i");
  if (eq_matrix.rows() != eq_rhs.size() || (eq_matrix.rows() > 0 && eq_matrix.cols() != num_vars())) {
    throw Error(ErrorCode::DimensionMismatch, "SDP: equality block");
  }
}

void StandardSdp::validate() const {
  check_blocks(c, block_sizes, "C");
  for (const auto& ai : a) check_blocks(ai, block_sizes, "A_i");
  if (b.size() != Eigen::Index(a.size())) {
    throw Error(ErrorCode::DimensionMismatch, "SDP: one b_i per constraint required");
  }
}

SolveReport solve_sdp(const StandardSdp& sdp, const SdpOptions& opt) {
  sdp.validate();
  const IpmResult r = interior_point(sdp.block_sizes, sdp.c, sdp.a, sdp.b, opt);
  SolveReport rep;
  rep.status = r.status;
  rep.value = r.pobj;
  rep.x = r.y;
  rep.blocks = r.x;
  rep.dual_blocks = r.z;
  rep.primal_residual = r.pres;
  rep.dual_residual = r.dres;
  rep.gap = r.gap;
  rep.min_eigenvalue = block_min_eigenvalue(r.x);
  rep.iterations = r.iterations;
  return rep;
}

SolveReport solve_sdp(const SemidefiniteProgram& sdp, const SdpOptions& opt) {
  sdp.validate();
  const int n = sdp.num_vars();
  const int nb = int(sdp.block_sizes.size());

  // Eliminate E y = f through y = y0 + N z.
  RVector y0 = RVector::Zero(n);
  RMatrix null = RMatrix::Identity(n, n);
  if (sdp.eq_matrix.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(sdp.eq_matrix);
    y0 = cod.solve(sdp.eq_rhs);
    if ((sdp.eq_matrix * y0 - sdp.eq_rhs).norm() > opt.tol * (1.0 + sdp.eq_rhs.norm())) {
      SolveReport rep;
      rep.status = SolveStatus::Infeasible;
      return rep;
    }
    Eigen::FullPivLU<RMatrix> lu(sdp.eq_matrix);
    lu.setThreshold(1e-12);
    null = lu.kernel();
    if (lu.rank() == n) null.resize(n, 0);
    if (null.cols() > 0) {
      Eigen::HouseholderQR<RMatrix> qr(null);
      null = qr.householderQ() * RMatrix::Identity(n, null.cols());
    }
  }
  const int nz = int(null.cols());

  // SDPA data: C = F0 + sum y0_i F_i, A_j = -sum_i N_ij F_i, b = N^T c.
  BlockMatrix c = sdp.f0;
  for (int i = 0; i < n; ++i) {
    if (y0(i) == 0.0) continue;
    for (int k = 0; k < nb; ++k) c[k] += y0(i) * sdp.f[i][k];
  }
  std::vector<BlockMatrix> a(nz, zeros_like(sdp.block_sizes));
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < n; ++i) {
      const double w = null(i, j);
      if (w == 0.0) continue;
      for (int k = 0; k < nb; ++k) a[j][k] -= w * sdp.f[i][k];
    }
  }
  const RVector b = null.transpose() * sdp.objective;

  SolveReport rep;
  rep.x = y0;
  if (nz == 0) {
    rep.status = block_min_eigenvalue(c) >= -opt.tol ? SolveStatus::Optimal : SolveStatus::Infeasible;
    rep.value = sdp.objective.dot(y0);
    rep.blocks = c;
    rep.dual_blocks = zeros_like(sdp.block_sizes);
    rep.min_eigenvalue = block_min_eigenvalue(c);
    return rep;
  }
  const IpmResult r = interior_point(sdp.block_sizes, c, a, b, opt);
  rep.status = r.status;
  rep.x = y0 + null * r.y;
  rep.value = sdp.objective.dot(rep.x);
  BlockMatrix mapped = sdp.f0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < nb; ++k) mapped[k] += rep.x(i) * sdp.f[i][k];
  }
  rep.blocks = mapped;
  rep.dual_blocks = r.x;
  rep.primal_residual = sdp.eq_matrix.rows() > 0 ? (sdp.eq_matrix * rep.x - sdp.eq_rhs).norm() : 0.0;
  rep.dual_residual = r.pres;
  rep.gap = r.gap;
  rep.min_eigenvalue = block_min_eigenvalue(mapped);
  rep.iterations = r.iterations;
  return rep;
}

}  // namespace hdbell
