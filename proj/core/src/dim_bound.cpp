#include "hdbell/dim_bound.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "hdbell/error.hpp"

namespace hdbell {

namespace {

int outcomes_of(const Scenario& s, int party) { return party == 0 ? s.outcomes_a : s.outcomes_b; }
int inputs_of(const Scenario& s, int party) { return party == 0 ? s.inputs_a : s.inputs_b; }

void check_dimension(const Scenario& s, int D) {
  if (D < 1 || D > s.outcomes_a || D > s.outcomes_b) {
    throw Error(ErrorCode::InvalidArgument,
                "dimension bound: need 1 <= D <= number of outcomes, got D = " + std::to_string(D));
  }
}

// 0/1 vectors of length d with D ones, lexicographic in the positions of the ones.
std::vector<std::vector<int>> subsets(int d, int D) {
  std::vector<std::vector<int>> out;
  std::vector<int> pos(D);
  std::iota(pos.begin(), pos.end(), 0);
  while (true) {
    std::vector<int> r(d, 0);
    for (int p : pos) r[p] = 1;
    out.push_back(std::move(r));
    int i = D - 1;
    while (i >= 0 && pos[i] == d - D + i) --i;
    if (i < 0) break;
    ++pos[i];
    for (int j = i + 1; j < D; ++j) pos[j] = pos[j - 1] + 1;
  }
  return out;
}

// Upper triangle with off-diagonals scaled by sqrt 2, so dot products match
// the Frobenius inner product.
RVector svec(const RMatrix& m) {
  const int n = int(m.rows());
  RVector v(n * (n + 1) / 2);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) v(k++) = i == j ? m(i, j) : std::sqrt(2.0) * m(i, j);
  }
  return v;
}

RMatrix smat(const RVector& v, int n) {
  RMatrix m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double x = i == j ? v(k) : v(k) / std::sqrt(2.0);
      m(i, j) = m(j, i) = x;
      ++k;
    }
  }
  return m;
}

CMatrix word_operator(const std::vector<Letter>& word, const std::vector<std::vector<CMatrix>>& proj,
                      int D) {
  CMatrix op = CMatrix::Identity(D, D);
  for (const Letter& l : word) op = op * proj[l.input][l.outcome];
  return op;
}

std::vector<std::vector<int>> dihedral_maps(int d) {
  std::set<std::vector<int>> maps;
  for (int k = 0; k < d; ++k) {
    std::vector<int> shift(d), flip(d);
    for (int a = 0; a < d; ++a) {
      shift[a] = (k + a) % d;
      flip[a] = ((k - a) % d + d) % d;
    }
    maps.insert(shift);
    maps.insert(flip);
  }
  return {maps.begin(), maps.end()};
}

std::vector<std::vector<int>> input_permutations(int m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  if (m > 3) return {p};
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Every choice of one map per input.
std::vector<std::vector<std::vector<int>>> outcome_assignments(int inputs, int d) {
  const std::vector<std::vector<int>> maps = dihedral_maps(d);
  std::vector<std::vector<std::vector<int>>> out{{}};
  for (int x = 0; x < inputs; ++x) {
    std::vector<std::vector<std::vector<int>>> next;
    for (const auto& partial : out) {
      for (const auto& m : maps) {
        auto e = partial;
        e.push_back(m);
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

void RankProfile::validate(const Scenario& s, int D) const {
  check_dimension(s, D);
  for (int party = 0; party < 2; ++party) {
    if (int(ranks[party].size()) != inputs_of(s, party)) {
      throw Error(ErrorCode::InvalidArgument, "rank profile: wrong number of inputs");
    }
    for (const auto& r : ranks[party]) {
      if (int(r.size()) != outcomes_of(s, party)) {
        throw Error(ErrorCode::InvalidArgument, "rank profile: wrong number of outcomes");
      }
      int total = 0;
      for (int v : r) {
        if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "rank profile: entries must be 0 or 1");
        total += v;
      }
      if (total != D) {
        throw Error(ErrorCode::InvalidArgument, "rank profile: ranks of an input must sum to D");
      }
    }
  }
}

std::string RankProfile::to_string() const {
  std::ostringstream os;
  for (int party = 0; party < 2; ++party) {
    if (party) os << ' ';
    os << (party == 0 ? "A" : "B") << '[';
    for (std::size_t x = 0; x < ranks[party].size(); ++x) {
      if (x) os << ',';
      for (int v : ranks[party][x]) os << v;
    }
    os << ']';
  }
  return os.str();
}

std::vector<RankProfile> enumerate_rank_profiles(const Scenario& s, int D) {
  check_dimension(s, D);
  const auto sa = subsets(s.outcomes_a, D);
  const auto sb = subsets(s.outcomes_b, D);
  // One slot per (party, input), the last Bob input varying fastest.
  std::vector<const std::vector<std::vector<int>>*> slots;
  for (int x = 0; x < s.inputs_a; ++x) slots.push_back(&sa);
  for (int y = 0; y < s.inputs_b; ++y) slots.push_back(&sb);
  std::vector<std::size_t> idx(slots.size(), 0);
  std::vector<RankProfile> out;
  while (true) {
    RankProfile p;
    for (int x = 0; x < s.inputs_a; ++x) p.ranks[0].push_back((*slots[x])[idx[x]]);
    for (int y = 0; y < s.inputs_b; ++y) p.ranks[1].push_back((*slots[s.inputs_a + y])[idx[s.inputs_a + y]]);
    out.push_back(std::move(p));
    int k = int(slots.size()) - 1;
    while (k >= 0 && ++idx[k] == slots[k]->size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<RankProfile> enumerate_rank_profiles(int d, int D) {
  return enumerate_rank_profiles(Scenario::multi_outcome(d), D);
}

std::string to_string(MonomialLevel level) {
  switch (level) {
    case MonomialLevel::One: return "1";
    case MonomialLevel::OneAB: return "1+AB";
    case MonomialLevel::OneABAA: return "1+AB+AA";
  }
  return "?";
}

MonomialLevel monomial_level_from_string(const std::string& s) {
  if (s == "1") return MonomialLevel::One;
  if (s == "1+AB") return MonomialLevel::OneAB;
  if (s == "1+AB+AA") return MonomialLevel::OneABAA;
  throw Error(ErrorCode::InvalidArgument, "unknown monomial level '" + s + "' (expected 1, 1+AB or 1+AB+AA)");
}

std::string Monomial::to_string() const {
  if (alice.empty() && bob.empty()) return "1";
  std::ostringstream os;
  for (const Letter& l : alice) os << 'A' << l.outcome << '|' << l.input;
  if (!alice.empty() && !bob.empty()) os << ' ';
  for (const Letter& l : bob) os << 'B' << l.outcome << '|' << l.input;
  return os.str();
}

int MonomialList::find(const Monomial& m) const {
  const auto it = std::find(words.begin(), words.end(), m);
  return it == words.end() ? -1 : int(it - words.begin());
}

MonomialList build_monomials(const Scenario& s, MonomialLevel level) {
  s.validate();
  MonomialList list;
  list.level = level;
  list.words.push_back({});
  for (int x = 0; x < s.inputs_a; ++x)
    for (int a = 0; a < s.outcomes_a; ++a) list.words.push_back({{{a, x}}, {}});
  for (int y = 0; y < s.inputs_b; ++y)
    for (int b = 0; b < s.outcomes_b; ++b) list.words.push_back({{}, {{b, y}}});
  if (level == MonomialLevel::One) return list;
  for (int x = 0; x < s.inputs_a; ++x)
    for (int a = 0; a < s.outcomes_a; ++a)
      for (int y = 0; y < s.inputs_b; ++y)
        for (int b = 0; b < s.outcomes_b; ++b) list.words.push_back({{{a, x}}, {{b, y}}});
  if (level == MonomialLevel::OneAB) return list;
  for (int x = 0; x < s.inputs_a; ++x)
    for (int x2 = 0; x2 < s.inputs_a; ++x2) {
      if (x == x2) continue;
      for (int a = 0; a < s.outcomes_a; ++a)
        for (int a2 = 0; a2 < s.outcomes_a; ++a2) list.words.push_back({{{a, x}, {a2, x2}}, {}});
    }
  for (int y = 0; y < s.inputs_b; ++y)
    for (int y2 = 0; y2 < s.inputs_b; ++y2) {
      if (y == y2) continue;
      for (int b = 0; b < s.outcomes_b; ++b)
        for (int b2 = 0; b2 < s.outcomes_b; ++b2) list.words.push_back({{}, {{b, y}, {b2, y2}}});
    }
  return list;
}

CMatrix sample_moment_matrix(const Scenario& s, const RankProfile& profile,
                             const MonomialList& monomials, int D, Rng& rng) {
  profile.validate(s, D);
  // proj[party][input][outcome]
  std::array<std::vector<std::vector<CMatrix>>, 2> proj;
  for (int party = 0; party < 2; ++party) {
    for (const auto& r : profile.ranks[party]) {
      const CMatrix basis = random_orthonormal_basis(D, rng);
      std::vector<CMatrix> ops;
      int col = 0;
      for (int v : r) {
        ops.push_back(v ? projector(basis.col(col++)) : CMatrix::Zero(D, D));
      }
      proj[party].push_back(std::move(ops));
    }
  }
  const CVector psi = random_unit_vector(D * D, rng);
  // psi as a D x D matrix M with psi(i D + j) = M(i, j); (A (x) B) psi = A M B^T.
  const CMatrix m = Eigen::Map<const CMatrix>(psi.data(), D, D).transpose();
  const int n = monomials.size();
  CMatrix w(D * D, n);
  for (int k = 0; k < n; ++k) {
    const Monomial& u = monomials.words[k];
    const CMatrix out = word_operator(u.alice, proj[0], D) * m *
                        word_operator(u.bob, proj[1], D).transpose();
    const CMatrix flat = out.transpose();
    w.col(k) = Eigen::Map<const CVector>(flat.data(), D * D);
  }
  const CMatrix g = w.adjoint() * w;
  return 0.5 * (g + g.adjoint());
}

SpanBuilder::SpanBuilder(int n, double tol) : n_(n), tol_(tol) {}

bool SpanBuilder::add(const RMatrix& m) {
  const RVector v = svec(m);
  const double norm = v.norm();
  if (norm == 0.0) return false;
  RVector r = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (const RVector& b : basis_) r -= b.dot(r) * b;
  }
  const double res = r.norm();
  if (res <= tol_ * norm) return false;
  basis_.push_back(r / res);
  return true;
}

RMatrix SpanBuilder::element(int k) const { return smat(basis_.at(k), n_); }

SpanBasis affine_span_basis(const std::vector<RMatrix>& samples, double tol) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "span basis: no samples");
  SpanBuilder span(int(samples.front().rows()), tol);
  for (const RMatrix& m : samples) span.add(m);
  SpanBasis out;
  out.dimension = span.dimension();
  for (int k = 0; k < out.dimension; ++k) out.basis.push_back(span.element(k));
  return out;
}

std::vector<Symmetry> functional_symmetries(const BellFunctional& f, double tol) {
  f.validate();
  const Scenario& s = f.scenario;
  const bool can_swap = s.inputs_a == s.inputs_b && s.outcomes_a == s.outcomes_b;
  const auto ia = input_permutations(s.inputs_a);
  const auto ib = input_permutations(s.inputs_b);
  const auto oa = outcome_assignments(s.inputs_a, s.outcomes_a);
  const auto ob = outcome_assignments(s.inputs_b, s.outcomes_b);
  const double scale = tol * (1.0 + *std::max_element(f.coeffs.begin(), f.coeffs.end(),
                                                      [](double l, double r) { return std::abs(l) < std::abs(r); }));

  std::vector<Symmetry> out;
  for (int swap = 0; swap <= (can_swap ? 1 : 0); ++swap) {
    for (const auto& pa : ia)
      for (const auto& pb : ib)
        for (const auto& sa : oa)
          for (const auto& sb : ob) {
            bool invariant = true;
            for (int x = 0; x < s.inputs_a && invariant; ++x)
              for (int y = 0; y < s.inputs_b && invariant; ++y)
                for (int a = 0; a < s.outcomes_a && invariant; ++a)
                  for (int b = 0; b < s.outcomes_b && invariant; ++b) {
                    const int a2 = sa[x][a], x2 = pa[x], b2 = sb[y][b], y2 = pb[y];
                    const double img = swap ? f.coeff(b2, a2, y2, x2) : f.coeff(a2, b2, x2, y2);
                    invariant = std::abs(img - f.coeff(a, b, x, y)) <= scale;
                  }
            if (invariant) out.push_back({bool(swap), {pa, pb}, {sa, sb}});
          }
  }
  return out;
}

RankProfile apply_symmetry(const Symmetry& g, const RankProfile& p) {
  RankProfile out;
  for (int party = 0; party < 2; ++party) {
    const int target = g.swap_parties ? 1 - party : party;
    out.ranks[target] = p.ranks[party];
    for (std::size_t x = 0; x < p.ranks[party].size(); ++x) {
      const auto& r = p.ranks[party][x];
      std::vector<int> img(r.size(), 0);
      for (std::size_t a = 0; a < r.size(); ++a) img[g.outcome_perm[party][x][a]] = r[a];
      out.ranks[target][g.input_perm[party][x]] = std::move(img);
    }
  }
  return out;
}

std::vector<RankProfile> profile_orbit(const RankProfile& p, const std::vector<Symmetry>& syms) {
  std::set<RankProfile> seen{p};
  std::vector<RankProfile> frontier{p};
  while (!frontier.empty()) {
    std::vector<RankProfile> next;
    for (const RankProfile& q : frontier) {
      for (const Symmetry& g : syms) {
        RankProfile r = apply_symmetry(g, q);
        if (seen.insert(r).second) next.push_back(std::move(r));
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

void DimBoundOptions::validate() const {
  if (!(span_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "dimension bound: span_tol must be positive");
  if (dependent_draws < 1) throw Error(ErrorCode::InvalidArgument, "dimension bound: dependent_draws must be >= 1");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "dimension bound: threads must be >= 1");
}

ProfileBound profile_bound(const BellFunctional& f, const RankProfile& profile, int D,
                           const MonomialList& monomials, const DimBoundOptions& opt, Rng& rng) {
  const Scenario& s = f.scenario;
  profile.validate(s, D);
  const int n = monomials.size();
  ProfileBound out;
  out.profile = profile;

  // Sample until dependent_draws consecutive draws add nothing to the span.
  SpanBuilder span(n, opt.span_tol);
  RMatrix total = RMatrix::Zero(n, n);
  const long cap = long(n) * (n + 1) / 2 + opt.dependent_draws;
  int dependent = 0;
  for (long draws = 0; dependent < opt.dependent_draws && draws < cap; ++draws) {
    const RMatrix g = sample_moment_matrix(s, profile, monomials, D, rng).real();
    total += g;
    dependent = span.add(g) ? 0 : dependent + 1;
  }
  const int m = span.dimension();
  out.span_dimension = m;

  // Every element of the span vanishes on the kernel of the sample sum, so
  // the PSD constraint lives on its range.
  Eigen::SelfAdjointEigenSolver<RMatrix> es(total);
  const RVector& ev = es.eigenvalues();
  const double cut = 1e-9 * ev.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (ev(i) > cut) keep.push_back(i);
  RMatrix range(n, int(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) range.col(j) = es.eigenvectors().col(keep[j]);
  out.reduced_size = int(keep.size());

  std::vector<std::vector<int>> pos_a(s.inputs_a, std::vector<int>(s.outcomes_a));
  std::vector<std::vector<int>> pos_b(s.inputs_b, std::vector<int>(s.outcomes_b));
  for (int x = 0; x < s.inputs_a; ++x)
    for (int a = 0; a < s.outcomes_a; ++a) pos_a[x][a] = monomials.find({{{a, x}}, {}});
  for (int y = 0; y < s.inputs_b; ++y)
    for (int b = 0; b < s.outcomes_b; ++b) pos_b[y][b] = monomials.find({{}, {{b, y}}});

  // maximize sum_j t_j <c, B_j>  s.t.  sum_j t_j P^T B_j P >= 0,  sum_j t_j B_j(1, 1) = 1.
  SemidefiniteProgram sdp;
  sdp.block_sizes = {out.reduced_size};
  sdp.f0 = {RMatrix::Zero(out.reduced_size, out.reduced_size)};
  sdp.objective.resize(m);
  sdp.eq_matrix.resize(1, m);
  sdp.eq_rhs = RVector::Ones(1);
  for (int j = 0; j < m; ++j) {
    const RMatrix b = span.element(j);
    double o = 0.0;
    for (int x = 0; x < s.inputs_a; ++x)
      for (int y = 0; y < s.inputs_b; ++y)
        for (int a = 0; a < s.outcomes_a; ++a)
          for (int c = 0; c < s.outcomes_b; ++c) o += f.coeff(a, c, x, y) * b(pos_a[x][a], pos_b[y][c]);
    sdp.objective(j) = o;
    sdp.eq_matrix(0, j) = b(0, 0);
    RMatrix reduced = range.transpose() * b * range;
    sdp.f.push_back({0.5 * (reduced + reduced.transpose())});
  }
  const SolveReport rep = solve_sdp(sdp, opt.sdp);
  out.status = rep.status;
  out.value = rep.value + f.offset;
  out.primal_residual = rep.primal_residual;
  out.dual_residual = rep.dual_residual;
  out.gap = rep.gap;
  out.min_eigenvalue = rep.min_eigenvalue;
  out.iterations = rep.iterations;
  return out;
}

DimBoundReport dim_bound_report(const BellFunctional& f, int D, const DimBoundOptions& opt) {
  f.validate();
  opt.validate();
  const Scenario& s = f.scenario;
  check_dimension(s, D);
  const MonomialList monomials = build_monomials(s, opt.level);
  const std::vector<RankProfile> all = enumerate_rank_profiles(s, D);

  DimBoundReport report;
  report.dimension = D;
  report.level = opt.level;
  std::vector<Symmetry> syms;
  if (opt.use_symmetry) syms = functional_symmetries(f);
  report.symmetries = int(syms.size());

  // One representative per orbit, seeded by its position in the enumeration.
  std::vector<std::size_t> reps;
  std::vector<int> orbit_sizes;
  std::set<RankProfile> covered;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (covered.count(all[i])) continue;
    const std::vector<RankProfile> orbit = profile_orbit(all[i], syms);
    covered.insert(orbit.begin(), orbit.end());
    reps.push_back(i);
    orbit_sizes.push_back(int(orbit.size()));
  }

  std::vector<ProfileBound> results(reps.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < reps.size(); k = next++) {
      Rng rng(derive_seed(opt.seed, reps[k]));
      try {
        results[k] = profile_bound(f, all[reps[k]], D, monomials, opt, rng);
      } catch (const Error&) {
        results[k].profile = all[reps[k]];
        results[k].status = SolveStatus::MaxIterations;
      }
      results[k].orbit_size = orbit_sizes[k];
    }
  };
  const int threads = int(std::min<std::size_t>(std::size_t(opt.threads), reps.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  double best = -kInf;
  for (const ProfileBound& r : results) {
    if (r.status != SolveStatus::Optimal) {
      ++report.failed_profiles;
      continue;
    }
    if (r.value > best) {
      best = r.value;
      report.best_profile = r.profile;
    }
  }
  if (report.failed_profiles == int(results.size())) {
    throw Error(ErrorCode::NumericalFailure, "dimension bound: every profile failed");
  }
  report.value = best;
  std::set<RankProfile> tied;
  for (const ProfileBound& r : results) {
    if (r.status != SolveStatus::Optimal || r.value < best - 1e-6) continue;
    for (RankProfile& q : profile_orbit(r.profile, syms)) tied.insert(std::move(q));
  }
  report.maximizers.assign(tied.begin(), tied.end());
  report.partial = report.failed_profiles > 0;
  report.profiles = std::move(results);
  return report;
}

double dim_bound(const BellFunctional& f, int D, const DimBoundOptions& opt) {
  return dim_bound_report(f, D, opt).value;
}

}  // namespace hdbell
