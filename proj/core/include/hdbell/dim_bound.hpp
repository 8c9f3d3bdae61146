#pragma once

// Upper bounds on Bell values reachable with D-dimensional entanglement.
// Moment matrices of random rank-one realizations, with the projector ranks
// fixed by a rank profile, span an affine set; the bound for a profile is the
// largest value over the PSD part of that set, and the dimension bound is the
// maximum over profiles. The method is heuristic: it is only as complete as
// the sampled span.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hdbell/convex.hpp"
#include "hdbell/functionals.hpp"

namespace hdbell {

/// Which outcomes carry a rank-one projector, per party and input.
struct RankProfile {
  /// ranks[party][input][outcome] in {0, 1}; party 0 is Alice.
  std::array<std::vector<std::vector<int>>, 2> ranks;

  /// Throws InvalidArgument unless every input has exactly D ones.
  void validate(const Scenario& s, int D) const;
  std::string to_string() const;

  friend bool operator==(const RankProfile&, const RankProfile&) = default;
  friend auto operator<=>(const RankProfile&, const RankProfile&) = default;
};

/// All profiles for the scenario, in lexicographic order of the subsets.
/// Requires 1 <= D <= outcomes of each party.
std::vector<RankProfile> enumerate_rank_profiles(const Scenario& s, int D);
std::vector<RankProfile> enumerate_rank_profiles(int d, int D);

enum class MonomialLevel {
  /// Identity and single projectors.
  One,
  /// Adds every product A_{a|x} B_{b|y}.
  OneAB,
  /// Adds products of two projectors of one party at different inputs.
  OneABAA,
};

std::string to_string(MonomialLevel level);
MonomialLevel monomial_level_from_string(const std::string& s);

struct Letter {
  int outcome = 0;
  int input = 0;
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Operator word (Alice letters) (x) (Bob letters); letters multiply left to right.
struct Monomial {
  std::vector<Letter> alice;
  std::vector<Letter> bob;

  std::string to_string() const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

struct MonomialList {
  MonomialLevel level = MonomialLevel::OneAB;
  std::vector<Monomial> words;

  int size() const { return int(words.size()); }
  /// Position of the word, or -1.
  int find(const Monomial& m) const;
};

/// Identity first, then Alice letters, Bob letters, and the level's products.
MonomialList build_monomials(const Scenario& s, MonomialLevel level);

/// Gram matrix <u psi, v psi> of a random realization: Haar bases per input
/// whose columns become the rank-one projectors of the profile's outcomes, and
/// a Haar random pure state on C^D (x) C^D.
CMatrix sample_moment_matrix(const Scenario& s, const RankProfile& profile,
                             const MonomialList& monomials, int D, Rng& rng);

/// Incremental orthonormal basis of a span of symmetric matrices, in the
/// Frobenius inner product.
class SpanBuilder {
 public:
  SpanBuilder(int n, double tol);
  /// Adds the matrix if its residual against the span exceeds tol times its
  /// norm; returns whether it was added.
  bool add(const RMatrix& m);
  int dimension() const { return int(basis_.size()); }
  /// Basis element k as a symmetric matrix.
  RMatrix element(int k) const;

 private:
  int n_;
  double tol_;
  std::vector<RVector> basis_;
};

struct SpanBasis {
  std::vector<RMatrix> basis;
  int dimension = 0;
};

SpanBasis affine_span_basis(const std::vector<RMatrix>& samples, double tol = 1e-9);

/// Relabeling of parties, inputs and outcomes.
struct Symmetry {
  bool swap_parties = false;
  /// input_perm[party][x] = image of input x.
  std::array<std::vector<int>, 2> input_perm;
  /// outcome_perm[party][x][a] = image of outcome a at input x.
  std::array<std::vector<std::vector<int>>, 2> outcome_perm;
};

/// Relabelings under which the coefficient tensor is invariant. Candidates
/// are dihedral outcome maps per input, all input permutations, and the party
/// swap when the scenario allows it.
std::vector<Symmetry> functional_symmetries(const BellFunctional& f, double tol = 1e-12);

RankProfile apply_symmetry(const Symmetry& g, const RankProfile& p);

/// Closure of the profile under the symmetries, sorted.
std::vector<RankProfile> profile_orbit(const RankProfile& p, const std::vector<Symmetry>& syms);

struct DimBoundOptions {
  MonomialLevel level = MonomialLevel::OneAB;
  /// Relative residual below which a sample counts as linearly dependent.
  double span_tol = 1e-9;
  /// Consecutive dependent samples that end sampling.
  int dependent_draws = 3;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Solve one profile per symmetry orbit.
  bool use_symmetry = true;
  SdpOptions sdp{};

  void validate() const;
};

struct ProfileBound {
  RankProfile profile;
  int orbit_size = 1;
  /// Bound with f's offset included; meaningful only when status is Optimal.
  double value = 0.0;
  int span_dimension = 0;
  int reduced_size = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double min_eigenvalue = 0.0;
  int iterations = 0;
};

struct DimBoundReport {
  int dimension = 0;
  MonomialLevel level = MonomialLevel::OneAB;
  double value = 0.0;
  /// Some profile failed; value is the maximum over the rest.
  bool partial = false;
  int failed_profiles = 0;
  RankProfile best_profile;
  /// Every profile (orbits expanded) within 1e-6 of the bound, sorted.
  std::vector<RankProfile> maximizers;
  int symmetries = 0;
  std::vector<ProfileBound> profiles;
};

/// Bound for one profile (rng drives the sampler).
ProfileBound profile_bound(const BellFunctional& f, const RankProfile& profile, int D,
                           const MonomialList& monomials, const DimBoundOptions& opt, Rng& rng);

/// Errors: InvalidArgument for bad D or options; NumericalFailure if every
/// profile fails.
DimBoundReport dim_bound_report(const BellFunctional& f, int D, const DimBoundOptions& opt = {});
double dim_bound(const BellFunctional& f, int D, const DimBoundOptions& opt = {});

}  // namespace hdbell
