#include "hdbell/quantum_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "hdbell/error.hpp"

namespace hdbell {

Scenario Scenario::multi_outcome(int d) { return Scenario{2, 2, d, d}; }

Scenario Scenario::binarised(int d) { return Scenario{2 * d, 2 * d, 2, 2}; }

void Scenario::validate() const {
  if (inputs_a < 1 || inputs_b < 1 || outcomes_a < 1 || outcomes_b < 1) {
    throw Error(ErrorCode::InvalidArgument, "scenario sizes must be >= 1");
  }
}

Behavior::Behavior(Scenario scenario, std::vector<double> values, double normalization_tol)
    : scenario_(scenario), values_(std::move(values)) {
  scenario_.validate();
  if (values_.size() != scenario_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "behavior has " + std::to_string(values_.size()) + " entries, scenario needs " +
                    std::to_string(scenario_.size()));
  }
  for (double& v : values_) {
    if (!std::isfinite(v) || v < -kNegativityClamp) {
      throw Error(ErrorCode::InvalidArgument, "behavior entry " + std::to_string(v) +
                                                  " is negative or not finite");
    }
    v = std::max(v, 0.0);
  }
  const std::size_t block = std::size_t(scenario_.outcomes_a) * scenario_.outcomes_b;
  for (std::size_t start = 0; start < values_.size(); start += block) {
    double sum = 0.0;
    for (std::size_t k = 0; k < block; ++k) sum += values_[start + k];
    if (std::abs(sum - 1.0) > normalization_tol) {
      std::ostringstream msg;
      msg << "setting block " << start / block << " sums to " << sum;
      throw Error(ErrorCode::NotNormalized, msg.str());
    }
  }
}

Behavior Behavior::uniform(const Scenario& scenario) {
  scenario.validate();
  const double v = 1.0 / (double(scenario.outcomes_a) * scenario.outcomes_b);
  return Behavior(scenario, std::vector<double>(scenario.size(), v));
}

double Behavior::signaling() const {
  const Scenario& s = scenario_;
  double worst = 0.0;
  for (int x = 0; x < s.inputs_a; ++x) {
    for (int a = 0; a < s.outcomes_a; ++a) {
      double ref = 0.0;
      for (int y = 0; y < s.inputs_b; ++y) {
        double m = 0.0;
        for (int b = 0; b < s.outcomes_b; ++b) m += (*this)(a, b, x, y);
        if (y == 0) ref = m;
        worst = std::max(worst, std::abs(m - ref));
      }
    }
  }
  for (int y = 0; y < s.inputs_b; ++y) {
    for (int b = 0; b < s.outcomes_b; ++b) {
      double ref = 0.0;
      for (int x = 0; x < s.inputs_a; ++x) {
        double m = 0.0;
        for (int a = 0; a < s.outcomes_a; ++a) m += (*this)(a, b, x, y);
        if (x == 0) ref = m;
        worst = std::max(worst, std::abs(m - ref));
      }
    }
  }
  return worst;
}

Scenario QuantumModel::scenario() const {
  if (meas_a.empty() || meas_b.empty()) {
    throw Error(ErrorCode::InvalidModel, "model has no measurements");
  }
  return Scenario{int(meas_a.size()), int(meas_b.size()), int(meas_a.front().size()),
                  int(meas_b.front().size())};
}

namespace {

void validate_measurements(const MeasurementSet& meas, int dim, bool projective,
                           const char* who) {
  const auto fail = [who](const std::string& what) {
    throw Error(ErrorCode::InvalidModel, std::string(who) + ": " + what);
  };
  if (meas.empty()) fail("no inputs");
  const std::size_t outcomes = meas.front().size();
  const CMatrix identity = CMatrix::Identity(dim, dim);
  for (std::size_t x = 0; x < meas.size(); ++x) {
    if (meas[x].size() != outcomes || outcomes == 0) fail("ragged outcome lists");
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (std::size_t a = 0; a < outcomes; ++a) {
      const CMatrix& op = meas[x][a];
      if (op.rows() != dim || op.cols() != dim) fail("operator dimension mismatch");
      if (!is_hermitian(op, 1e-9)) fail("operator not Hermitian");
      if (hermitian_eigenvalues(op, 1e-9).minCoeff() < -1e-9) fail("operator not PSD");
      sum += op;
      if (projective) {
        if ((op * op - op).norm() > 1e-9) fail("operator not idempotent");
        for (std::size_t b = 0; b < a; ++b) {
          if ((op * meas[x][b]).norm() > 1e-9) fail("projectors not orthogonal");
        }
      }
    }
    if ((sum - identity).norm() > 1e-9) {
      fail("input " + std::to_string(x) + " does not sum to identity");
    }
  }
}

}  // namespace

void QuantumModel::validate() const {
  if (dim < 1) throw Error(ErrorCode::InvalidModel, "dimension must be >= 1");
  const Eigen::Index n = Eigen::Index(dim) * dim;
  if (state.rows() != n || state.cols() != n) {
    throw Error(ErrorCode::InvalidModel, "state has wrong size");
  }
  if (!is_hermitian(state, 1e-10)) throw Error(ErrorCode::InvalidModel, "state not Hermitian");
  if (std::abs(state.trace().real() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidModel, "state trace is not one");
  }
  if (hermitian_eigenvalues(state, 1e-10).minCoeff() < -1e-10) {
    throw Error(ErrorCode::InvalidModel, "state not PSD");
  }
  validate_measurements(meas_a, dim, projective, "Alice");
  validate_measurements(meas_b, dim, projective, "Bob");
}

Behavior born_behavior(const QuantumModel& model) {
  model.validate();
  const Scenario s = model.scenario();
  const int dim = model.dim;
  std::vector<double> p(s.size());
  for (int x = 0; x < s.inputs_a; ++x) {
    for (int a = 0; a < s.outcomes_a; ++a) {
      const CMatrix& op_a = model.meas_a[x][a];
      // reduced(k, l) = sum_ij A(j, i) rho((i, k), (j, l))
      CMatrix reduced = CMatrix::Zero(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const Complex w = op_a(j, i);
          if (w == Complex(0.0)) continue;
          reduced += w * model.state.block(Eigen::Index(i) * dim, Eigen::Index(j) * dim, dim, dim);
        }
      for (int y = 0; y < s.inputs_b; ++y) {
        for (int b = 0; b < s.outcomes_b; ++b) {
          const double v = (model.meas_b[y][b] * reduced).trace().real();
          p[s.index(a, b, x, y)] = v < 0.0 && v > -1e-9 ? 0.0 : v;
        }
      }
    }
  }
  return Behavior(s, std::move(p), 1e-8);
}

std::vector<CMatrix> fourier_measurement(int d, double phase, bool conjugate) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  const double sign = conjugate ? -1.0 : 1.0;
  std::vector<CMatrix> out;
  out.reserve(d);
  for (int a = 0; a < d; ++a) {
    CVector v(d);
    for (int k = 0; k < d; ++k) {
      const double angle = 2.0 * std::numbers::pi * k * (sign * a + phase) / d;
      v[k] = std::polar(1.0 / std::sqrt(double(d)), angle);
    }
    out.push_back(projector(v));
  }
  return out;
}

CVector schmidt_vector(const StateSpec& spec) {
  const int d = int(spec.schmidt.size());
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "empty Schmidt spectrum");
  double norm = 0.0;
  for (double l : spec.schmidt) {
    if (l < 0.0) throw Error(ErrorCode::InvalidArgument, "negative Schmidt coefficient");
    norm += l * l;
  }
  if (std::abs(norm - 1.0) > 1e-10) {
    throw Error(ErrorCode::NotNormalized, "sum of squared Schmidt coefficients is " +
                                              std::to_string(norm));
  }
  CVector psi = CVector::Zero(Eigen::Index(d) * d);
  for (int k = 0; k < d; ++k) psi[Eigen::Index(k) * d + k] = spec.schmidt[k];
  return psi;
}

CMatrix build_schmidt_state(const StateSpec& spec) { return projector(schmidt_vector(spec)); }

CMatrix maximally_entangled_state(int d) {
  return build_schmidt_state(StateSpec{std::vector<double>(d, 1.0 / std::sqrt(double(d)))});
}

Behavior mix_behaviors(const Behavior& p1, const Behavior& p2, double v) {
  if (!(p1.scenario() == p2.scenario())) {
    throw Error(ErrorCode::ScenarioMismatch, "cannot mix behaviors of different scenarios");
  }
  if (v < 0.0 || v > 1.0) throw Error(ErrorCode::InvalidArgument, "mixing weight outside [0,1]");
  if (v == 1.0) return p1;
  if (v == 0.0) return p2;
  std::vector<double> out(p1.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = v * p1.values()[i] + (1.0 - v) * p2.values()[i];
  }
  return Behavior(p1.scenario(), std::move(out));
}

std::vector<std::vector<double>> marginal(const Behavior& p, Party party, double tol) {
  const Scenario& s = p.scenario();
  const bool alice = party == Party::A;
  const int inputs = alice ? s.inputs_a : s.inputs_b;
  const int outcomes = alice ? s.outcomes_a : s.outcomes_b;
  const int other_inputs = alice ? s.inputs_b : s.inputs_a;
  const int other_outcomes = alice ? s.outcomes_b : s.outcomes_a;
  std::vector<std::vector<double>> out(inputs, std::vector<double>(outcomes, 0.0));
  for (int x = 0; x < inputs; ++x) {
    for (int a = 0; a < outcomes; ++a) {
      double first = 0.0;
      double total = 0.0;
      for (int y = 0; y < other_inputs; ++y) {
        double m = 0.0;
        for (int b = 0; b < other_outcomes; ++b) m += alice ? p(a, b, x, y) : p(b, a, y, x);
        if (y == 0) first = m;
        if (std::abs(m - first) > tol) {
          std::ostringstream msg;
          msg << (alice ? "Alice" : "Bob") << " marginal of outcome " << a << " at input " << x
              << " is " << first << " under other input 0 but " << m << " under other input "
              << y;
          throw Error(ErrorCode::SignalingDetected, msg.str());
        }
        total += m;
      }
      out[x][a] = total / other_inputs;
    }
  }
  return out;
}

QuantumModel fourier_model(int d, std::span<const double> alice_phases,
                           std::span<const double> bob_phases, const CMatrix& state) {
  QuantumModel model;
  model.dim = d;
  model.state = state;
  model.projective = true;
  for (double phase : alice_phases) model.meas_a.push_back(fourier_measurement(d, phase, false));
  for (double phase : bob_phases) model.meas_b.push_back(fourier_measurement(d, phase, true));
  return model;
}

QuantumModel cglmp_reference_model(int d) {
  const double alice[] = {0.0, 0.5};
  const double bob[] = {-0.25, 0.25};
  if (d == 4) {
    // Published coefficients are rounded to four decimals; renormalize.
    std::vector<double> lambda = {0.5686, 0.4204, 0.4204, 0.5686};
    double norm = 0.0;
    for (double l : lambda) norm += l * l;
    for (double& l : lambda) l /= std::sqrt(norm);
    return fourier_model(d, alice, bob, build_schmidt_state(StateSpec{lambda}));
  }
  return fourier_model(d, alice, bob, maximally_entangled_state(d));
}

QuantumModel satwap_reference_model(int d) {
  const double alice[] = {-0.25, -0.75};
  const double bob[] = {0.5, 1.0};
  return fourier_model(d, alice, bob, maximally_entangled_state(d));
}

}  // namespace hdbell
