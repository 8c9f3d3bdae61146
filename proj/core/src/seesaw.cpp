#include "hdbell/seesaw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "hdbell/error.hpp"

namespace hdbell {

void SeesawConfig::validate() const {
  if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "seesaw: dimension must be >= 1");
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "seesaw: restarts must be >= 1");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "seesaw: max_iterations must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "seesaw: tolerance must be positive");
  if (stall_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "seesaw: stall_sweeps must be >= 1");
}

namespace {

// T(i, j) = sum_kl B(l, k) rho((i, k), (j, l)), so tr((A (x) B) rho) = tr(A T).
CMatrix contract_b(const CMatrix& rho, const CMatrix& b, int dim) {
  CMatrix t = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) s += b(l, k) * rho(i * dim + k, j * dim + l);
      t(i, j) = s;
    }
  return t;
}

// T(k, l) = sum_ij A(j, i) rho((i, k), (j, l)), so tr((A (x) B) rho) = tr(B T).
CMatrix contract_a(const CMatrix& rho, const CMatrix& a, int dim) {
  CMatrix t = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const Complex w = a(j, i);
      if (w == Complex(0.0)) continue;
      t += w * rho.block(i * dim, j * dim, dim, dim);
    }
  return t;
}

double trace_product(const CMatrix& a, const CMatrix& b) {
  // tr(A B) for Hermitian A, B is real.
  return (a.transpose().cwiseProduct(b)).sum().real();
}

// Positive-part projector of a Hermitian matrix.
CMatrix positive_projector(const CMatrix& h) {
  const EigDecomposition e = hermitian_eig(hermitian_part(h), 1e-8);
  CMatrix p = CMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) > 0.0) p += e.vectors.col(k) * e.vectors.col(k).adjoint();
  }
  return p;
}

// Clips negative eigenvalues and rescales so the operators sum to identity.
std::vector<CMatrix> repair_povm(std::vector<CMatrix> ops) {
  const Eigen::Index n = ops.front().rows();
  CMatrix total = CMatrix::Zero(n, n);
  for (CMatrix& op : ops) {
    const EigDecomposition e = hermitian_eig(hermitian_part(op), 1e-6);
    RVector clipped = e.values.cwiseMax(0.0);
    op = e.vectors * clipped.asDiagonal() * e.vectors.adjoint();
    total += op;
  }
  const EigDecomposition e = hermitian_eig(hermitian_part(total), 1e-8);
  if (e.values.minCoeff() <= 1e-9) return {};
  const RVector inv_sqrt = e.values.cwiseSqrt().cwiseInverse();
  const CMatrix s = e.vectors * inv_sqrt.asDiagonal() * e.vectors.adjoint();
  for (CMatrix& op : ops) op = hermitian_part(s * op * s);
  return ops;
}

// Per-input optimum of sum_a tr(A_a R_a) over POVMs, through the real
// embedding of each block. The structured part of the symmetric solution is
// again optimal, so extracting the Hermitian part loses nothing.
std::vector<CMatrix> sdp_measurement(const std::vector<CMatrix>& r, const SdpOptions& opt,
                                     bool& ok) {
  const int outcomes = int(r.size());
  const int n = int(r.front().rows());
  const int m = 2 * n;
  StandardSdp sdp;
  sdp.block_sizes.assign(outcomes, m);
  for (const CMatrix& ra : r) sdp.c.push_back(-embed_real(hermitian_part(ra)));
  const int rows = m * (m + 1) / 2;
  sdp.b = RVector::Zero(rows);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j, ++k) {
      RMatrix e = RMatrix::Zero(m, m);
      if (i == j) {
        e(i, i) = 1.0;
        sdp.b(k) = 1.0;
      } else {
        e(i, j) = e(j, i) = 0.5;
      }
      sdp.a.push_back(BlockMatrix(outcomes, e));
    }
  }
  const SolveReport rep = solve_sdp(sdp, opt);
  ok = rep.optimal();
  if (!ok) return {};
  std::vector<CMatrix> out;
  out.reserve(outcomes);
  for (const RMatrix& x : rep.blocks) out.push_back(extract_hermitian(x));
  return out;
}

std::vector<CMatrix> optimal_measurement(const std::vector<CMatrix>& r, const SdpOptions& opt,
                                         bool& ok) {
  ok = true;
  const Eigen::Index n = r.front().rows();
  if (r.size() == 1) return {CMatrix::Identity(n, n)};
  if (r.size() == 2) {
    const CMatrix p = positive_projector(r[0] - r[1]);
    return {p, CMatrix::Identity(n, n) - p};
  }
  std::vector<CMatrix> ops = sdp_measurement(r, opt, ok);
  if (!ok) return {};
  ops = repair_povm(std::move(ops));
  if (ops.empty()) ok = false;
  return ops;
}

double measurement_objective(const std::vector<CMatrix>& ops, const std::vector<CMatrix>& r) {
  double v = 0.0;
  for (std::size_t a = 0; a < ops.size(); ++a) v += trace_product(ops[a], r[a]);
  return v;
}

BellFunctional negated(const BellFunctional& f) {
  BellFunctional g = f;
  for (double& c : g.coeffs) c = -c;
  g.offset = -g.offset;
  return g;
}

struct RestartOutcome {
  bool failed = false;
  bool degraded = false;
  double value = -kInf;
  QuantumModel model;
  std::vector<double> trajectory;
};

RestartOutcome run_restart(const BellFunctional& f, const SeesawConfig& cfg, int restart) {
  RestartOutcome out;
  try {
    Rng rng(derive_seed(cfg.seed, std::uint64_t(restart)));
    QuantumModel model = random_projective_model(f.scenario, cfg.dimension, rng);
    double value = state_step(f, model);
    out.trajectory.push_back(value);
    int stalled = 0;
    for (int it = 0; it < cfg.max_iterations && stalled < cfg.stall_sweeps; ++it) {
      if (!measurement_step(f, model, Party::A, cfg.sdp)) out.degraded = true;
      if (!measurement_step(f, model, Party::B, cfg.sdp)) out.degraded = true;
      const double next = state_step(f, model);
      stalled = next - value < cfg.tol ? stalled + 1 : 0;
      value = next;
      out.trajectory.push_back(value);
    }
    out.value = model_value(f, model);
    out.model = std::move(model);
  } catch (const Error&) {
    out.failed = true;
    out.trajectory.clear();
  }
  return out;
}

}  // namespace

double model_value(const BellFunctional& f, const QuantumModel& model) {
  const Scenario& s = f.scenario;
  double v = f.offset;
  for (int y = 0; y < s.inputs_b; ++y) {
    for (int b = 0; b < s.outcomes_b; ++b) {
      const CMatrix t = contract_b(model.state, model.meas_b[y][b], model.dim);
      for (int x = 0; x < s.inputs_a; ++x) {
        for (int a = 0; a < s.outcomes_a; ++a) {
          const double c = f.coeff(a, b, x, y);
          if (c != 0.0) v += c * trace_product(model.meas_a[x][a], t);
        }
      }
    }
  }
  return v;
}

QuantumModel random_projective_model(const Scenario& s, int dim, Rng& rng) {
  QuantumModel m;
  m.dim = dim;
  m.projective = true;
  const CVector psi = random_unit_vector(dim * dim, rng);
  m.state = psi * psi.adjoint();
  const auto party = [&](int inputs, int outcomes) {
    MeasurementSet set(inputs);
    for (int x = 0; x < inputs; ++x) {
      const CMatrix u = random_orthonormal_basis(dim, rng);
      std::vector<int> perm(outcomes);
      for (int k = 0; k < outcomes; ++k) perm[k] = k;
      for (int k = outcomes - 1; k > 0; --k) {
        std::uniform_int_distribution<int> pick(0, k);
        std::swap(perm[k], perm[pick(rng)]);
      }
      set[x].assign(outcomes, CMatrix::Zero(dim, dim));
      for (int i = 0; i < dim; ++i) set[x][perm[i % outcomes]] += u.col(i) * u.col(i).adjoint();
    }
    return set;
  };
  m.meas_a = party(s.inputs_a, s.outcomes_a);
  m.meas_b = party(s.inputs_b, s.outcomes_b);
  return m;
}

std::vector<std::vector<CMatrix>> reduced_operators(const BellFunctional& f,
                                                    const QuantumModel& model, Party party) {
  const Scenario& s = f.scenario;
  const int dim = model.dim;
  const bool alice = party == Party::A;
  const int mine_in = alice ? s.inputs_a : s.inputs_b;
  const int mine_out = alice ? s.outcomes_a : s.outcomes_b;
  const int other_in = alice ? s.inputs_b : s.inputs_a;
  const int other_out = alice ? s.outcomes_b : s.outcomes_a;
  std::vector<std::vector<CMatrix>> r(mine_in, std::vector<CMatrix>(mine_out, CMatrix::Zero(dim, dim)));
  for (int y = 0; y < other_in; ++y) {
    for (int b = 0; b < other_out; ++b) {
      const CMatrix t = alice ? contract_b(model.state, model.meas_b[y][b], dim)
                              : contract_a(model.state, model.meas_a[y][b], dim);
      for (int x = 0; x < mine_in; ++x) {
        for (int a = 0; a < mine_out; ++a) {
          const double c = alice ? f.coeff(a, b, x, y) : f.coeff(b, a, y, x);
          if (c != 0.0) r[x][a] += c * t;
        }
      }
    }
  }
  // tr(A T) uses T as is; keep the Hermitian part against round-off.
  for (auto& rx : r)
    for (CMatrix& op : rx) op = hermitian_part(op);
  return r;
}

bool measurement_step(const BellFunctional& f, QuantumModel& model, Party party,
                      const SdpOptions& opt) {
  const auto r = reduced_operators(f, model, party);
  MeasurementSet& set = party == Party::A ? model.meas_a : model.meas_b;
  bool all_ok = true;
  bool projective = true;
  for (std::size_t x = 0; x < r.size(); ++x) {
    bool ok = true;
    std::vector<CMatrix> ops = optimal_measurement(r[x], opt, ok);
    if (!ok) {
      all_ok = false;
      continue;
    }
    if (measurement_objective(ops, r[x]) >= measurement_objective(set[x], r[x])) {
      set[x] = std::move(ops);
      if (r[x].size() > 2) projective = false;
    }
  }
  if (!projective) model.projective = false;
  return all_ok;
}

CMatrix bell_operator(const BellFunctional& f, const QuantumModel& model) {
  const Scenario& s = f.scenario;
  const int n = model.dim * model.dim;
  CMatrix op = CMatrix::Zero(n, n);
  for (int x = 0; x < s.inputs_a; ++x)
    for (int a = 0; a < s.outcomes_a; ++a) {
      // Sum Bob's side first: one kron per (a, x).
      CMatrix bsum = CMatrix::Zero(model.dim, model.dim);
      for (int y = 0; y < s.inputs_b; ++y)
        for (int b = 0; b < s.outcomes_b; ++b) {
          const double c = f.coeff(a, b, x, y);
          if (c != 0.0) bsum += c * model.meas_b[y][b];
        }
      op += kron(model.meas_a[x][a], bsum);
    }
  return hermitian_part(op);
}

double state_step(const BellFunctional& f, QuantumModel& model) {
  const EigDecomposition e = hermitian_eig(bell_operator(f, model), 1e-8);
  const CVector psi = e.vectors.col(0).normalized();
  model.state = psi * psi.adjoint();
  return e.values(0) + f.offset;
}

SeesawResult seesaw(const BellFunctional& f_in, const SeesawConfig& cfg) {
  cfg.validate();
  f_in.validate();
  const BellFunctional f = cfg.minimize ? negated(f_in) : f_in;

  std::vector<RestartOutcome> outcomes(cfg.restarts);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < cfg.restarts; r = next++) outcomes[r] = run_restart(f, cfg, r);
  };
  const int threads = std::clamp(cfg.threads, 1, cfg.restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SeesawResult res;
  const double sign = cfg.minimize ? -1.0 : 1.0;
  double best = -kInf;
  for (int r = 0; r < cfg.restarts; ++r) {
    RestartOutcome& o = outcomes[r];
    if (o.failed) ++res.failed_restarts;
    if (o.degraded) ++res.degraded_restarts;
    for (double& v : o.trajectory) v *= sign;
    res.trajectories.push_back(std::move(o.trajectory));
    res.restart_values.push_back(o.failed ? std::nan("") : sign * o.value);
    if (!o.failed && o.value > best) {
      best = o.value;
      res.best_restart = r;
    }
  }
  if (res.best_restart < 0) throw Error(ErrorCode::NumericalFailure, "seesaw: every restart failed");
  res.value = sign * best;
  res.model = std::move(outcomes[res.best_restart].model);
  return res;
}

}  // namespace hdbell
